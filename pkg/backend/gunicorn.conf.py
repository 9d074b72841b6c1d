"""Gunicorn settings for the germ cohomology API; reads the same environment as app.config."""

import multiprocessing
import os

bind = f"{os.getenv('API_HOST', '0.0.0.0')}:{os.getenv('PORT', '8000')}"
worker_class = "uvicorn.workers.UvicornWorker"
# requests are CPU bound
workers = int(os.getenv("WEB_CONCURRENCY", multiprocessing.cpu_count()))
timeout = int(os.getenv("GERMCOH_TIMEOUT", "300"))
preload_app = True

accesslog = "-"
errorlog = "-"
loglevel = os.getenv("GERMCOH_LOG_LEVEL", "info").lower()
access_log_format = '%(h)s %(t)s "%(r)s" %(s)s %(b)s %(D)sus'

proc_name = "germcoh-api"
