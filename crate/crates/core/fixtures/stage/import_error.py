import networkx_nonexistent_module as nx


def solve(input_file: str, solution_file: str):
    nx.solve(input_file, solution_file)
