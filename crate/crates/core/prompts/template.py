def solve(input_file: str, solution_file: str):
    """
    Solve the optimization problem.

    Please do NOT change the function name and arguments.
    Inputs should be read from input_file
    and outputs should be written to solution_file.
    Input and output formats have been specified in the problem statement.
    """
    raise NotImplementedError(
        "This is a placeholder implementation you need to fill in."
    )
