from RopeTK.Cli.main import build_parser
from RopeTK.Cli.main import main
from RopeTK.Cli.pipeline import process_scene
from RopeTK.Cli.pipeline import run_pipeline
from RopeTK.Cli.pipeline import RunConfig
