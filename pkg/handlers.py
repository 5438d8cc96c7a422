import json

from buffer import QuantumBuffer
from errors import FrameworkError
from ir import composite_from_json
from simulator import StatevectorSimulator


def reply(request, status, payload=None):
    body = json.dumps(payload if payload is not None else {}).encode()
    request.send_response(status)
    request.send_header("Content-Type", "application/json")
    request.send_header("Content-Length", str(len(body)))
    request.end_headers()
    request.wfile.write(body)


def read_json(request):
    length = int(request.headers.get("Content-Length") or 0)
    raw = request.rfile.read(length) if length else b""
    try:
        return json.loads(raw.decode() or "null")
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ValueError(f"malformed JSON body: {e}") from None


def requires_json(fn):
    def wrapper(server, request, *args):
        try:
            body = read_json(request)
        except ValueError as e:
            server.log(f"Error: {e}")
            reply(request, 400, {"error": str(e)})
            return
        if not isinstance(body, dict):
            reply(request, 400, {"error": "expected a JSON object"})
            return
        return fn(server, request, body, *args)
    return wrapper


def _program_size(program, requested):
    if requested is not None:
        return int(requested)
    size = program.max_qubit() + 1
    for leaf in program.leaves():
        if leaf.is_measure:
            size = max(size, max(leaf.classical_targets()) + 1)
    return max(size, 1)


@requires_json
def submit_job(server, request, body):
    shots = body.get("shots")
    seed = body.get("seed")
    size = body.get("size")
    if not isinstance(shots, int) or isinstance(shots, bool) or shots < 0:
        reply(request, 400, {"error": "'shots' must be a non-negative integer"})
        return
    if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool)):
        reply(request, 400, {"error": "'seed' must be an integer"})
        return
    if size is not None and (not isinstance(size, int) or isinstance(size, bool) or size < 1):
        reply(request, 400, {"error": "'size' must be a positive integer"})
        return
    try:
        program = composite_from_json(body.get("program"))
    except FrameworkError as e:
        reply(request, 400, {"error": f"invalid program: {e}"})
        return

    job_id = server.jobs.create(
        {"program": program, "shots": shots, "seed": seed, "size": _program_size(program, size)}
    )
    server.submit(job_id)
    server.log(f"Job {job_id}: queued {program.name} ({shots} shots)")
    reply(request, 201, {"id": job_id})


def job_status(server, request, job_id):
    job = server.jobs.get(job_id)
    if job is None:
        reply(request, 404, {"error": f"job '{job_id}' not found"})
        return
    payload = {"status": job["status"]}
    if job["status"] == "done":
        if "error" in job:
            payload["error"] = job["error"]
        else:
            payload["counts"] = job["counts"]
            payload["metadata"] = job["metadata"]
    reply(request, 200, payload)


def not_found(server, request):
    reply(request, 404, {"error": f"no route for {request.command} {request.path}"})


def run_job(server, job_id):
    job = server.jobs.update(job_id, status="running")
    if job is None:
        return
    options = {"shots": job["shots"]}
    if job["seed"] is not None:
        options["seed"] = job["seed"]
    try:
        buffer = QuantumBuffer(job["size"], name=job["program"].name)
        StatevectorSimulator().initialize(options).execute(buffer, job["program"])
    except Exception as e:
        server.log(f"Job {job_id}: failed: {e}")
        server.jobs.update(job_id, status="done", error=str(e))
        return
    server.jobs.update(
        job_id,
        status="done",
        counts=buffer.measurement_counts(),
        metadata=buffer.metadata.to_json(),
    )
    server.log(f"Job {job_id}: done")
