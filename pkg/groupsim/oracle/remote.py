"""Remote chat-completions oracle.

Posts each rendered prompt as a single user message and returns the first
choice's content. Transient failures are retried with exponential backoff.
"""

from __future__ import annotations

import logging
import time
from typing import Any, Optional

import requests

from ..config import OracleSettings
from ..core import (
    LogContext,
    OracleError,
    OracleUnavailable,
    get_correlation_id,
    get_logger,
    redact_headers,
)
from .base import OracleRequest

DEFAULT_BACKOFF_BASE = 2.0
RETRY_STATUS = frozenset({429, 500, 502, 503, 504})

NETWORK_ERRORS: tuple[type[Exception], ...] = (
    requests.exceptions.ConnectionError,
    requests.exceptions.Timeout,
    requests.exceptions.ChunkedEncodingError,
    ConnectionResetError,
    BrokenPipeError,
)


class _RetryableStatus(Exception):
    def __init__(self, status: int) -> None:
        self.status = status
        super().__init__(f"HTTP {status}")


class RemoteOracle:
    """HTTP chat-completions client.

    Usage:
        oracle = RemoteOracle.from_settings(cfg["oracle"])
        text = oracle.complete(request, prompt)
    """

    name = "remote"

    def __init__(
        self,
        endpoint: str,
        api_key: str = "",
        model: str = "",
        *,
        temperature: float = 0.1,
        timeout: int = 60,
        max_retries: int = 3,
        backoff_base: float = DEFAULT_BACKOFF_BASE,
        session: Optional[requests.Session] = None,
        logger: Optional[logging.Logger] = None,
    ) -> None:
        self.endpoint = endpoint
        self.model = model
        self.temperature = temperature
        self.timeout = timeout
        self.max_retries = max_retries
        self.backoff_base = backoff_base
        self._api_key = api_key
        self.session = session or requests.Session()
        self.log = logger or get_logger(__name__)

    @classmethod
    def from_settings(
        cls, settings: OracleSettings, *, session: Optional[requests.Session] = None
    ) -> "RemoteOracle":
        return cls(
            endpoint=settings["endpoint"],
            api_key=settings["api_key"],
            model=settings["model"],
            temperature=settings["temperature"],
            timeout=settings["timeout"],
            max_retries=settings["max_retries"],
            session=session,
        )

    @property
    def supports_group_search(self) -> bool:
        return True

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        if self._api_key:
            headers["Authorization"] = f"Bearer {self._api_key}"
        correlation_id = get_correlation_id()
        if correlation_id:
            headers["X-Correlation-ID"] = correlation_id
        return headers

    def _payload(self, prompt: str) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.temperature,
        }
        if self.model:
            payload["model"] = self.model
        return payload

    def _post(self, payload: dict[str, Any]) -> str:
        headers = self._headers()
        if self.log.isEnabledFor(logging.DEBUG):
            self.log.debug(
                "Oracle request",
                extra={"headers": redact_headers(headers), "body": payload},
            )
        response = self.session.post(
            self.endpoint, json=payload, headers=headers, timeout=self.timeout
        )
        if response.status_code in RETRY_STATUS:
            raise _RetryableStatus(response.status_code)
        if response.status_code >= 400:
            raise OracleError(
                f"Oracle rejected request: HTTP {response.status_code}",
                details={"endpoint": self.endpoint, "status": response.status_code},
                operation="oracle",
            )
        try:
            data = response.json()
            content = data["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise OracleError(
                "Oracle response is not a chat completion",
                details={"endpoint": self.endpoint, "error": str(exc)},
                operation="oracle",
            ) from exc
        self.log.debug("Oracle response", extra={"body": content})
        return str(content)

    def complete(self, request: OracleRequest, prompt: str) -> str:
        """Send ``prompt`` and return the reply text.

        Raises:
            OracleUnavailable: If every attempt failed with a network error or
                a retryable status.
            OracleError: On a non-retryable HTTP error or a malformed body.
        """
        payload = self._payload(prompt)
        last_exc: Optional[Exception] = None
        attempts = self.max_retries + 1
        operation = f"oracle_{request.template.value}"

        with LogContext(
            operation, self.log, log_entry_exit=False, agent=request.agent_id, day=request.day
        ):
            for attempt in range(attempts):
                try:
                    return self._post(payload)
                except (*NETWORK_ERRORS, _RetryableStatus) as e:
                    last_exc = e
                    if attempt < self.max_retries:
                        wait_time = self.backoff_base ** (attempt + 1)
                        self.log.warning(
                            "Oracle error during %s (attempt %d/%d): %s. Retrying in %.1fs",
                            operation,
                            attempt + 1,
                            attempts,
                            e,
                            wait_time,
                        )
                        time.sleep(wait_time)
                    else:
                        self.log.error(
                            "Oracle error during %s after %d attempts: %s",
                            operation,
                            attempts,
                            e,
                        )
            raise OracleUnavailable(self.endpoint, attempts, last_exc)
