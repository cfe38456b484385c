import argparse
import sys

import uvicorn

from .app import create_app
from .config import config_from_env
from .model import FillMaskModel


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mlm-service",
        description="Serve a fill-mask model over the prosepoet predictor protocol.",
    )
    parser.add_argument("--model", help="model id or local checkpoint path (or $MODEL_ID)")
    parser.add_argument("--port", type=int, help="listen port (or $PORT, default 8100)")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--max-top-k", type=int, default=200)
    parser.add_argument("--max-tokens", type=int, default=128)
    args = parser.parse_args(argv)

    try:
        cfg = config_from_env(
            model_id=args.model,
            port=args.port,
            host=args.host,
            device=args.device,
            max_top_k=args.max_top_k,
            max_tokens=args.max_tokens,
        )
        model = FillMaskModel(cfg.model_id, cfg.device, cfg.max_tokens)
    except Exception as exc:
        print(f"error: cannot start service: {exc}", file=sys.stderr)
        return 1

    app = create_app(cfg, model=model)
    uvicorn.run(app, host=cfg.host, port=cfg.port, log_level="warning")
    return 0


if __name__ == "__main__":
    sys.exit(main())
