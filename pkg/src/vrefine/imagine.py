"""Visual imagination: synthesize reference images from the textual intent.

Runs once, before refinement.  Skipped whenever the user already supplied
reference images or the run disables imagination; idempotent, so a second
call is a no-op.
"""

from __future__ import annotations

from typing import Optional

from .errors import BackendError
from .imaging import load_image
from .types import Intent
from .vlm import ImageGenClient


class MockFileImagination:
    """Loads a fixed image file; the offline stand-in for a diffusion model."""

    def __init__(self, path):
        self.path = path

    def generate(self, prompt: str):
        try:
            return load_image(self.path)
        except OSError as exc:
            raise BackendError(f"mock imagination file unreadable: {exc}") from exc


class HttpImagination:
    """Text-to-image over HTTP (see vlm.ImageGenClient for the wire shape)."""

    def __init__(self, client: Optional[ImageGenClient] = None):
        self.client = client or ImageGenClient()

    def generate(self, prompt: str):
        return self.client.generate(prompt)


def imagine(backend, intent: Intent, enabled: bool = True,
            count: int = 1) -> Intent:
    """Populate ``imagined_images`` from the intent text.

    Returns the intent unchanged when reference images exist, imagination
    is disabled, images were already imagined, or no backend is given.
    Uses ``expanded_text`` when present.
    """
    if backend is None or not enabled:
        return intent
    if intent.reference_images or intent.imagined_images:
        return intent
    prompt = intent.effective_text()
    images = tuple(backend.generate(prompt) for _ in range(max(1, count)))
    return Intent(text=intent.text, reference_images=(),
                  imagined_images=images, expanded_text=intent.expanded_text)
