"""Load a candidate module and call solve(input_file, solution_file).

Exit code 3 means the candidate could not be loaded or has no solve().
"""
import importlib.util
import sys
import traceback


def main():
    source, input_file, solution_file = sys.argv[1:4]
    try:
        spec = importlib.util.spec_from_file_location("candidate", source)
        module = importlib.util.module_from_spec(spec)
        sys.modules["candidate"] = module
        spec.loader.exec_module(module)
    except BaseException:
        traceback.print_exc()
        sys.exit(3)
    solve = getattr(module, "solve", None)
    if not callable(solve):
        print("candidate does not define solve(input_file, solution_file)", file=sys.stderr)
        sys.exit(3)
    solve(input_file, solution_file)


if __name__ == "__main__":
    main()
