# iteration 2: a very naive mapping strategy. Simply copy the input to the output. 

def solve(input_file: str, solution_file: str):
    raw = open(input_file).read().splitlines()
    merged = []
    i = 0
    while i < len(raw):
        line = raw[i].rstrip()
        if not line or line.lstrip().startswith('#'):
            i += 1
            continue
        if line.endswith('\\'):
            accum = line[:-1].rstrip()
            i += 1
            while i < len(raw):
                nxt = raw[i].rstrip()
                if nxt.endswith('\\'):
                    accum += ' ' + nxt[:-1].rstrip()
                    i += 1
                else:
                    accum += ' ' + nxt
                    i += 1
                    break
            merged.append(accum)
        else:
            merged.append(line)
            i += 1
    with open(solution_file, 'w') as f:
        for l in merged:
            f.write(l + '\n')
