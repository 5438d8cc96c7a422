"""Remote accelerator: submits composites to a job server and polls results."""
from __future__ import annotations

import time

import requests

from accelerator import Accelerator
from config import HTTP_TIMEOUT, POLL_INTERVAL, REMOTE_TIMEOUT, remote_endpoint
from errors import FrameworkError, HttpError, JobNotFound, RemoteTimeout
from hetmap import HetMap, Variant
from log import get_logger
from simulator import concrete_leaves

logger = get_logger("client")


def _request(session, method, url, **kwargs):
    try:
        return session.request(method, url, timeout=HTTP_TIMEOUT, **kwargs)
    except requests.Timeout as e:
        raise RemoteTimeout(f"{method.upper()} {url} timed out: {e}") from None
    except requests.RequestException as e:
        raise HttpError(None, str(e)) from None


def remote_submit(endpoint, program, options=None, size=None, session=None) -> str:
    """POST the JSON-IR program; returns the job id."""
    options = HetMap.coerce(options or {})
    body = {"shots": options.get_or("shots", Variant.INT, 0), "program": program.to_json()}
    if "seed" in options:
        body["seed"] = options.get("seed", Variant.INT)
    if size is not None:
        body["size"] = int(size)
    resp = _request(session or requests, "post", f"{endpoint}/jobs", json=body)
    if resp.status_code != 201:
        raise HttpError(resp.status_code, resp.text)
    job_id = resp.json()["id"]
    logger.debug(f"Submitted {program.name} as job {job_id}")
    return job_id


def remote_poll(endpoint, job_id, timeout=REMOTE_TIMEOUT, poll_interval=POLL_INTERVAL, session=None) -> dict:
    """Block until the job is done or the deadline passes."""
    deadline = time.monotonic() + timeout
    while True:
        resp = _request(session or requests, "get", f"{endpoint}/jobs/{job_id}")
        if resp.status_code == 404:
            raise JobNotFound(job_id)
        if not resp.ok:
            raise HttpError(resp.status_code, resp.text)
        data = resp.json()
        if data.get("status") == "done":
            return data
        if time.monotonic() > deadline:
            raise RemoteTimeout(f"job {job_id} still {data.get('status')} after {timeout}s")
        time.sleep(poll_interval)


class RemoteAccelerator(Accelerator):
    """Options: "endpoint", "shots", "seed", "timeout", "poll-interval"."""

    def __init__(self):
        super().__init__()
        self.session = None

    def name(self):
        return "remote"

    def is_remote(self):
        return True

    def endpoint(self, options=None):
        options = options if options is not None else self.options
        return remote_endpoint(options.get_or("endpoint", Variant.TEXT, None))

    def execute_one(self, buffer, composite, options):
        concrete_leaves(composite)
        if self.session is None:
            self.session = requests.Session()
        endpoint = self.endpoint(options)
        job_id = remote_submit(endpoint, composite, options, size=buffer.size, session=self.session)
        data = remote_poll(
            endpoint,
            job_id,
            timeout=options.get_or("timeout", Variant.REAL, REMOTE_TIMEOUT),
            poll_interval=options.get_or("poll-interval", Variant.REAL, POLL_INTERVAL),
            session=self.session,
        )
        if "error" in data:
            raise FrameworkError(f"remote job {job_id} failed: {data['error']}")
        buffer.set_counts(data.get("counts") or {})
        for key, value in (data.get("metadata") or {}).items():
            buffer.add_info(key, value)
