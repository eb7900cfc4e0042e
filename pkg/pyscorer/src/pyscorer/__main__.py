import argparse

import uvicorn

from .app import ServiceConfig, create_app


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="pyscorer", description="Pair scoring and embedding service")
    parser.add_argument("--cross-encoder", default="hash", help="model name, or hash[:dim=..,seed=..]")
    parser.add_argument("--bi-encoder", default="hash", help="model name, or hash[:dim=..,seed=..]")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8100)
    parser.add_argument("--max-batch", type=int, default=32)
    parser.add_argument("--max-request-items", type=int, default=8192)
    args = parser.parse_args(argv)
    config = ServiceConfig(
        cross_encoder=args.cross_encoder,
        bi_encoder=args.bi_encoder,
        max_batch_size=args.max_batch,
        max_request_items=args.max_request_items,
    )
    uvicorn.run(create_app(config), host=args.host, port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
