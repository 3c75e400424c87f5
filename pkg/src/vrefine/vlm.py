"""Thin client for chat-style VLM endpoints and image-generation endpoints.

Request shape follows the prevailing hosted-API convention: a JSON body
with ``model`` and ``messages``, message content as a list of parts that
interleave ``{"type": "text"}`` and ``{"type": "image_url"}`` entries
(images as base64 data URLs).  Endpoint, model and key come from the
environment unless passed explicitly:

    VREFINE_VLM_URL / VREFINE_VLM_MODEL / VREFINE_VLM_KEY
    VREFINE_IMG_URL / VREFINE_IMG_MODEL / VREFINE_IMG_KEY
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import requests as _requests

from .errors import BackendError
from .imaging import from_png_base64, to_png_base64

ENV_VLM_URL = "VREFINE_VLM_URL"
ENV_VLM_MODEL = "VREFINE_VLM_MODEL"
ENV_VLM_KEY = "VREFINE_VLM_KEY"
ENV_IMG_URL = "VREFINE_IMG_URL"
ENV_IMG_MODEL = "VREFINE_IMG_MODEL"
ENV_IMG_KEY = "VREFINE_IMG_KEY"


def text_part(text: str) -> dict:
    return {"type": "text", "text": text}


def image_part(image: np.ndarray) -> dict:
    data_url = f"data:image/png;base64,{to_png_base64(image)}"
    return {"type": "image_url", "image_url": {"url": data_url}}


def user_message(parts: Sequence[dict]) -> dict:
    return {"role": "user", "content": list(parts)}


@dataclass
class ChatClient:
    """POSTs chat completions; raises BackendError on any failure."""

    endpoint: Optional[str] = None
    model: Optional[str] = None
    api_key: Optional[str] = None
    timeout: float = 120.0
    session: object = field(default=None, repr=False)

    def __post_init__(self):
        self.endpoint = self.endpoint or os.environ.get(ENV_VLM_URL)
        self.model = self.model or os.environ.get(ENV_VLM_MODEL, "")
        self.api_key = self.api_key if self.api_key is not None \
            else os.environ.get(ENV_VLM_KEY)
        if self.session is None:
            self.session = _requests.Session()

    def complete(self, messages: Sequence[dict], temperature: float = 0.7) -> str:
        if not self.endpoint:
            raise BackendError(
                f"no VLM endpoint configured (set {ENV_VLM_URL})")
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = {"model": self.model, "messages": list(messages),
                "temperature": temperature}
        try:
            resp = self.session.post(self.endpoint, json=body, headers=headers,
                                     timeout=self.timeout)
            resp.raise_for_status()
            doc = resp.json()
        except (_requests.RequestException, ValueError) as exc:
            raise BackendError(f"chat request failed: {exc}") from exc
        try:
            return doc["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise BackendError(f"malformed chat response: {doc!r:.200}") from exc


@dataclass
class ImageGenClient:
    """POSTs text-to-image requests; returns the first image as a raster."""

    endpoint: Optional[str] = None
    model: Optional[str] = None
    api_key: Optional[str] = None
    size: str = "512x512"
    timeout: float = 300.0
    session: object = field(default=None, repr=False)

    def __post_init__(self):
        self.endpoint = self.endpoint or os.environ.get(ENV_IMG_URL)
        self.model = self.model or os.environ.get(ENV_IMG_MODEL, "")
        self.api_key = self.api_key if self.api_key is not None \
            else os.environ.get(ENV_IMG_KEY)
        if self.session is None:
            self.session = _requests.Session()

    def generate(self, prompt: str) -> np.ndarray:
        if not self.endpoint:
            raise BackendError(
                f"no image-generation endpoint configured (set {ENV_IMG_URL})")
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = {"model": self.model, "prompt": prompt, "n": 1, "size": self.size,
                "response_format": "b64_json"}
        try:
            resp = self.session.post(self.endpoint, json=body, headers=headers,
                                     timeout=self.timeout)
            resp.raise_for_status()
            doc = resp.json()
        except (_requests.RequestException, ValueError) as exc:
            raise BackendError(f"image request failed: {exc}") from exc
        try:
            return from_png_base64(doc["data"][0]["b64_json"])
        except Exception as exc:
            raise BackendError(f"malformed image response: {exc}") from exc
