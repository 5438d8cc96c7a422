"""Reference job server for the remote accelerator wire protocol.

POST /jobs       {"shots": int, "seed": int?, "size": int?, "program": <composite>} -> 201 {"id": ...}
GET  /jobs/<id>  -> 200 {"status": "queued"|"running"|"done", "counts"?, "metadata"?, "error"?}
"""
import queue
import signal
import threading
import uuid
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import urlsplit

import handlers
from config import DEFAULT_HOST, DEFAULT_PORT, JOB_HISTORY
from log import get_logger

logger = get_logger("server")

WORKERS = 2


class JobStore:
    """Jobs by id. Past `limit` entries the oldest finished jobs are dropped."""

    def __init__(self, limit=JOB_HISTORY):
        self.__jobs = {}
        self.__lock = threading.Lock()
        self.limit = limit

    def create(self, fields):
        job_id = uuid.uuid4().hex
        with self.__lock:
            self.__jobs[job_id] = {"status": "queued", **fields}
            self.__evict()
        return job_id

    def __evict(self):
        excess = len(self.__jobs) - self.limit
        if excess <= 0:
            return
        finished = [job_id for job_id, job in self.__jobs.items() if job["status"] == "done"]
        for job_id in finished[:excess]:
            del self.__jobs[job_id]

    def get(self, job_id):
        with self.__lock:
            job = self.__jobs.get(job_id)
            return dict(job) if job is not None else None

    def update(self, job_id, **fields):
        with self.__lock:
            job = self.__jobs.get(job_id)
            if job is None:
                return None
            job.update(fields)
            return dict(job)

    def __len__(self):
        with self.__lock:
            return len(self.__jobs)


class _RequestHandler(BaseHTTPRequestHandler):
    server_version = "qfabric"

    def do_POST(self):
        self.server.owner.dispatch(self)

    def do_GET(self):
        self.server.owner.dispatch(self)

    def log_message(self, format, *args):
        logger.debug(format % args)


class Server:
    def __init__(self, host=DEFAULT_HOST, port=DEFAULT_PORT, workers=WORKERS, install_signals=False):
        self.host = host
        self.jobs = JobStore()
        self.queue = queue.Queue()
        self.workers = workers
        self.threads = []
        self.__open_http_socket(host, port)

        # Shutdown handling
        self.stop_event = threading.Event()
        if install_signals:
            signal.signal(signal.SIGINT, self.__shutdown)
            signal.signal(signal.SIGTERM, self.__shutdown)

    @property
    def port(self):
        return self.httpd.server_address[1]

    @property
    def endpoint(self):
        return f"http://{self.host}:{self.port}"

    def log(self, msg):
        logger.info(msg)

    def submit(self, job_id):
        self.queue.put(job_id)

    def __open_http_socket(self, host, port):
        self.httpd = ThreadingHTTPServer((host, port), _RequestHandler)
        self.httpd.daemon_threads = True
        self.httpd.owner = self

    def __shutdown(self, *_):
        self.stop_event.set()

    def dispatch(self, request):
        path = urlsplit(request.path).path.rstrip("/")
        if request.command == "POST" and path == "/jobs":
            handlers.submit_job(self, request)
        elif request.command == "GET" and path.startswith("/jobs/") and path.count("/") == 2:
            handlers.job_status(self, request, path.rsplit("/", 1)[1])
        else:
            handlers.not_found(self, request)

    def __worker_loop(self):
        while not self.stop_event.is_set():
            try:
                job_id = self.queue.get(timeout=0.2)
            except queue.Empty:
                continue
            handlers.run_job(self, job_id)

    def start(self):
        http_thread = threading.Thread(target=self.httpd.serve_forever, kwargs={"poll_interval": 0.1}, daemon=True)
        http_thread.start()
        self.threads = [http_thread]
        for _ in range(self.workers):
            worker = threading.Thread(target=self.__worker_loop, daemon=True)
            worker.start()
            self.threads.append(worker)
        self.log(f"Listening on {self.endpoint}")
        return self

    def stop(self):
        self.stop_event.set()
        if self.threads:
            self.httpd.shutdown()
        self.httpd.server_close()
        for thread in self.threads:
            thread.join()
        self.threads = []
        self.log("Shutdown")

    def run(self):
        self.start()
        while not self.stop_event.wait(0.5):
            pass
        self.stop()

    def __enter__(self):
        return self.start()

    def __exit__(self, *_):
        self.stop()
