# iteration 3: static pruning by capping the number of cuts per node to M = 20; efficient bitwise operations

def solve(input_file: str, solution_file: str):
    from collections import deque
    raw_lines = open(input_file).read().splitlines()
    lines = []
    i = 0
    while i < len(raw_lines):
        line = raw_lines[i].rstrip()
        if not line or line.lstrip().startswith('#'):
            i += 1
            continue
        if line.endswith('\\'):
            accum = line[:-1].rstrip()
            i += 1
            while i < len(raw_lines):
                nxt = raw_lines[i].rstrip()
                if nxt.endswith('\\'):
                    accum += ' ' + nxt[:-1].rstrip()
                    i += 1
                else:
                    accum += ' ' + nxt
                    i += 1
                    break
            lines.append(accum)
        else:
            lines.append(line)
            i += 1
    class Node:
        def __init__(self, name):
            self.name = name
            self.fanin_names = []
            self.patterns_one = []
            self.patterns_zero = []
            self.const_val = None
            self.fanins = []
            self.fanouts = []
    model_name = ''
    input_list = []
    output_list = []
    nodes = {}
    idx = 0
    while idx < len(lines):
        l = lines[idx].strip()
        if not l:
            idx += 1
            continue
        if l.startswith('.model'):
            parts = l.split()
            if len(parts) > 1:
                model_name = parts[1]
            idx += 1
        elif l.startswith('.inputs'):
            parts = l.split()
            for name in parts[1:]:
                input_list.append(name)
                if name not in nodes:
                    nodes[name] = Node(name)
            idx += 1
        elif l.startswith('.outputs'):
            parts = l.split()
            for name in parts[1:]:
                output_list.append(name)
            idx += 1
        elif l.startswith('.names'):
            parts = l.split()
            in_names = parts[1:-1]
            out_name = parts[-1]
            if out_name not in nodes:
                nodes[out_name] = Node(out_name)
            node = nodes[out_name]
            node.fanin_names = in_names[:]
            patterns = []
            j = idx + 1
            while j < len(lines) and not lines[j].startswith('.'):
                s = lines[j].strip()
                if s:
                    patterns.append(s)
                j += 1
            if len(in_names) == 0:
                if patterns and patterns[0] == '1':
                    node.const_val = 1
                else:
                    node.const_val = 0
            else:
                for pline in patterns:
                    parts2 = pline.split()
                    if len(parts2) == 1:
                        mask = parts2[0]; bit = '1'
                    else:
                        mask = parts2[0]; bit = parts2[1]
                    if bit == '1':
                        node.patterns_one.append(mask)
                    else:
                        node.patterns_zero.append(mask)
            idx = j
        elif l.startswith('.end'):
            break
        else:
            idx += 1
    for node in nodes.values():
        node.fanins = [nodes[nm] for nm in node.fanin_names if nm in nodes]
        node.fanouts = []
    for node in nodes.values():
        for f in node.fanins:
            f.fanouts.append(node)
    reachable = set()
    stack = [nm for nm in output_list if nm in nodes]
    while stack:
        u = stack.pop()
        if u in reachable: continue
        reachable.add(u)
        for p in nodes[u].fanin_names:
            if p in nodes and p not in reachable:
                stack.append(p)
    nodes = {nm:nd for nm,nd in nodes.items() if nm in reachable}
    for nd in nodes.values():
        nd.fanins = [f for f in nd.fanins if f.name in nodes]
        nd.fanouts = [f for f in nd.fanouts if f.name in nodes]
    indeg = {nm: len(nd.fanins) for nm,nd in nodes.items()}
    dq = deque([nm for nm,d in indeg.items() if d == 0])
    topo = []
    while dq:
        u = dq.popleft()
        topo.append(u)
        for w in nodes[u].fanouts:
            indeg[w.name] -= 1
            if indeg[w.name] == 0:
                dq.append(w.name)
    topo_nodes = [nodes[nm] for nm in topo]
    name_to_idx = {nd.name:i for i,nd in enumerate(topo_nodes)}
    idx_to_node = topo_nodes
    idx_to_name = [nd.name for nd in topo_nodes]
    N = len(topo_nodes)
    PI_idx = set(name_to_idx[nm] for nm in input_list if nm in name_to_idx)
    self_mask = [1 << i for i in range(N)]
    K = 6
    M = 20
    cuts = [[] for _ in range(N)]
    for i, nd in enumerate(topo_nodes):
        if i in PI_idx or nd.const_val is not None:
            cuts[i] = [self_mask[i]]
            continue
        fan_idxs = [name_to_idx[x] for x in nd.fanin_names if x in name_to_idx]
        c_list = None
        for f in fan_idxs:
            fcuts = cuts[f]
            if c_list is None:
                c_list = fcuts[:M]
            else:
                newset = set()
                for a in c_list[:M]:
                    for b in fcuts[:M]:
                        u = a | b
                        if u.bit_count() <= K:
                            newset.add(u)
                if newset:
                    lst = sorted(newset, key=lambda x: x.bit_count())
                    c_list = lst[:M]
                else:
                    c_list = []
            if not c_list:
                break
        if c_list is None:
            c_list = []
        s = set(c_list)
        s.add(self_mask[i])
        lst2 = sorted(s, key=lambda x: x.bit_count())
        cuts[i] = lst2[:M]
    INF = 10**18
    cost = [0]*N
    bestM = [None]*N
    for i, nd in enumerate(topo_nodes):
        if i in PI_idx or nd.const_val is not None:
            cost[i] = 0
            bestM[i] = None
            continue
        bestc = INF
        bm = None
        for cm in cuts[i]:
            if cm == self_mask[i]:
                continue
            s = 0
            m = cm
            while m:
                lsb = m & -m
                j = lsb.bit_length() - 1
                s += cost[j]
                m ^= lsb
            cval = s + 1
            if cval < bestc:
                bestc = cval
                bm = cm
        if bm is None:
            s = 0
            mask = 0
            for f in nd.fanin_names:
                if f in name_to_idx:
                    j = name_to_idx[f]
                    mask |= self_mask[j]
                    s += cost[j]
            bm = mask
            bestc = s + 1
        cost[i] = bestc
        bestM[i] = bm
    mapping = set()
    stack = [name_to_idx[nm] for nm in output_list if nm in name_to_idx]
    visited = set()
    while stack:
        u = stack.pop()
        if u in visited:
            continue
        visited.add(u)
        bm = bestM[u]
        if bm is None or bm == self_mask[u]:
            continue
        mapping.add(u)
        m = bm
        while m:
            lsb = m & -m
            j = lsb.bit_length() - 1
            m ^= lsb
            if j not in visited and j not in PI_idx and topo_nodes[j].const_val is None:
                stack.append(j)
    mapped = [i for i in range(N) if i in mapping]
    with open(solution_file, 'w') as f:
        f.write('.model ' + model_name + '\n')
        f.write('.inputs ' + ' '.join(input_list) + '\n')
        f.write('.outputs ' + ' '.join(output_list) + '\n')
        for i in mapped:
            nd = topo_nodes[i]
            bm = bestM[i]
            leaves = [j for j in range(N) if (bm >> j) & 1]
            inputs = [idx_to_name[j] for j in leaves]
            k = len(inputs)
            Np = 1 << k
            full = (1 << Np) - 1
            masks = []
            for t in range(k):
                mm = 0
                for j in range(Np):
                    if (j >> t) & 1:
                        mm |= 1 << j
                masks.append(mm)
            val = {}
            for t,j in enumerate(leaves):
                val[j] = masks[t]
            vis = set(leaves)
            stack2 = [i]
            while stack2:
                u = stack2.pop()
                if u in vis:
                    continue
                vis.add(u)
                for p in topo_nodes[u].fanins:
                    pi = name_to_idx.get(p.name)
                    if pi is not None and pi not in vis:
                        stack2.append(pi)
            cone = [j for j in range(N) if j in vis and j not in leaves]
            for j in sorted(cone, key=lambda x: name_to_idx[topo_nodes[x].name]):
                v = topo_nodes[j]
                if v.const_val is not None:
                    val[j] = full if v.const_val == 1 else 0
                else:
                    if v.patterns_zero:
                        zm = 0
                        for p in v.patterns_zero:
                            mm = full
                            for t,ch in enumerate(p):
                                fn = v.fanin_names[t]
                                pj = name_to_idx.get(fn)
                                if pj is None:
                                    mm = 0
                                    break
                                vm = val[pj]
                                if ch == '1':
                                    mm &= vm
                                elif ch == '0':
                                    mm &= (~vm) & full
                            zm |= mm
                        val[j] = (~zm) & full
                    else:
                        om = 0
                        for p in v.patterns_one:
                            mm = full
                            for t,ch in enumerate(p):
                                fn = v.fanin_names[t]
                                pj = name_to_idx.get(fn)
                                if pj is None:
                                    mm = 0
                                    break
                                vm = val[pj]
                                if ch == '1':
                                    mm &= vm
                                elif ch == '0':
                                    mm &= (~vm) & full
                            om |= mm
                        val[j] = om
            root = val[i]
            f.write('.names ' + ' '.join(inputs) + ' ' + nd.name + '\n')
            for j in range(Np):
                if (root >> j) & 1:
                    bits = ''.join('1' if (j >> t) & 1 else '0' for t in range(k))
                    f.write(bits + ' 1\n')
        f.write('.end\n')

