"""JSON request/response layer: schemas, handlers, and the HTTP app.

The handlers are plain functions from request models to response models;
the FastAPI app and the CLI both call them, so every interface exercises
one code path.
"""
