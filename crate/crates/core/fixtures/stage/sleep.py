import time


def solve(input_file: str, solution_file: str):
    time.sleep(600)
