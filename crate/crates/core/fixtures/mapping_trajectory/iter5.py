# iteration 5: dynamic pruning of cut enumeration space

def solve(input_file: str, solution_file: str):
    from collections import deque
    raw = open(input_file).read().splitlines()
    lines = []
    i = 0
    while i < len(raw):
        l = raw[i].rstrip()
        if not l or l.lstrip().startswith('#'):
            i += 1
            continue
        if l.endswith('\\'):
            acc = l[:-1].rstrip()
            i += 1
            while i < len(raw):
                nl = raw[i].rstrip()
                if nl.endswith('\\'):
                    acc += ' ' + nl[:-1].rstrip()
                    i += 1
                else:
                    acc += ' ' + nl
                    i += 1
                    break
            lines.append(acc)
        else:
            lines.append(l)
            i += 1
    class Node:
        __slots__ = ('name','fanin_names','patterns_one','patterns_zero','const_val','fanins','fanouts')
        def __init__(self,n):
            self.name = n
            self.fanin_names = []
            self.patterns_one = []
            self.patterns_zero = []
            self.const_val = None
            self.fanins = []
            self.fanouts = []
    model = ''
    inputs = []
    outputs = []
    nodes = {}
    idx = 0
    while idx < len(lines):
        l = lines[idx].strip()
        if not l:
            idx += 1; continue
        if l.startswith('.model'):
            parts = l.split()
            if len(parts) > 1: model = parts[1]
            idx += 1
        elif l.startswith('.inputs'):
            parts = l.split()
            for nm in parts[1:]:
                inputs.append(nm)
                if nm not in nodes: nodes[nm] = Node(nm)
            idx += 1
        elif l.startswith('.outputs'):
            parts = l.split()
            for nm in parts[1:]:
                outputs.append(nm)
            idx += 1
        elif l.startswith('.names'):
            parts = l.split()
            inps = parts[1:-1]; outp = parts[-1]
            if outp not in nodes: nodes[outp] = Node(outp)
            nd = nodes[outp]
            nd.fanin_names = inps[:]
            pats = []
            j = idx + 1
            while j < len(lines) and not lines[j].startswith('.'):
                s = lines[j].strip()
                if s: pats.append(s)
                j += 1
            if not inps:
                nd.const_val = 1 if pats and pats[0] == '1' else 0
            else:
                for pt in pats:
                    sp = pt.split()
                    if len(sp) == 1:
                        mask, bit = sp[0], '1'
                    else:
                        mask, bit = sp[0], sp[1]
                    if bit == '1': nd.patterns_one.append(mask)
                    else: nd.patterns_zero.append(mask)
            idx = j
        elif l.startswith('.end'):
            break
        else:
            idx += 1
    for nd in nodes.values():
        nd.fanins = [nodes[nm] for nm in nd.fanin_names if nm in nodes]
    for nd in nodes.values():
        for f in nd.fanins:
            f.fanouts.append(nd)
    reachable = set()
    st = [nm for nm in outputs if nm in nodes]
    while st:
        u = st.pop()
        if u in reachable: continue
        reachable.add(u)
        for p in nodes[u].fanin_names:
            if p in nodes and p not in reachable:
                st.append(p)
    nodes = {nm:nd for nm,nd in nodes.items() if nm in reachable}
    for nd in nodes.values():
        nd.fanins = [f for f in nd.fanins if f.name in nodes]
        nd.fanouts = [f for f in nd.fanouts if f.name in nodes]
    indeg = {nm: len(nd.fanins) for nm,nd in nodes.items()}
    dq = deque([nm for nm,d in indeg.items() if d == 0])
    topo = []
    while dq:
        u = dq.popleft(); topo.append(u)
        for w in nodes[u].fanouts:
            indeg[w.name] -= 1
            if indeg[w.name] == 0: dq.append(w.name)
    topo_nodes = [nodes[nm] for nm in topo]
    N = len(topo_nodes)
    name_to_idx = {nd.name: i for i, nd in enumerate(topo_nodes)}
    idx_to_name = [nd.name for nd in topo_nodes]
    PI = set(name_to_idx[nm] for nm in inputs if nm in name_to_idx)
    cost = [0] * N
    bestM = [None] * N
    K = 6
    if N <= 1500:
        M = 64
    elif N <= 3000:
        M = 48
    elif N <= 5000:
        M = 32
    else:
        M = 20
    cuts = [[] for _ in range(N)]
    def prune_cuts(items, limit):
        items_sorted = sorted(items, key=lambda x: (x[1], x[0].bit_count()))
        pr = []
        for m, sc in items_sorted:
            dom = False
            for pm, psc in pr:
                if psc <= sc and (pm & m) == pm:
                    dom = True
                    break
            if not dom:
                pr.append((m, sc))
                if len(pr) >= limit:
                    break
        return pr
    for i, nd in enumerate(topo_nodes):
        if i in PI or nd.const_val is not None:
            cost[i] = 0
            bestM[i] = None
            cuts[i] = [(1 << i, 0)]
            continue
        fans = [name_to_idx[nm] for nm in nd.fanin_names if nm in name_to_idx]
        fans.sort(key=lambda x: len(cuts[x]))
        c_list = None
        for f in fans:
            fcuts = cuts[f]
            if not fcuts:
                c_list = []
                break
            fcuts = fcuts[:M]
            if c_list is None:
                c_list = fcuts.copy()
            else:
                newm = {}
                for m1, sc1 in c_list:
                    for m2, sc2 in fcuts:
                        m = m1 | m2
                        if m.bit_count() <= K:
                            s2 = sc1 + sc2
                            prev = newm.get(m)
                            if prev is None or s2 < prev:
                                newm[m] = s2
                if not newm:
                    c_list = []
                    break
                c_list = prune_cuts(list(newm.items()), M)
        if not c_list:
            um = 0; usc = 0
            for f in fans:
                um |= (1 << f)
                usc += cost[f]
            c_list = [(um, usc)]
        um = 0; usc = 0
        for f in fans:
            um |= (1 << f)
            usc += cost[f]
        if um.bit_count() <= K and all(m != um for m, _ in c_list):
            c_list.append((um, usc))
        c_list = prune_cuts(c_list, M)
        bestc = 10**18; bm = None
        selfm = (1 << i)
        for m, sc in c_list:
            if m == selfm:
                continue
            v = sc + 1
            if v < bestc:
                bestc = v; bm = m
        if bm is None:
            bm = um
            bestc = usc + 1
        cost[i] = bestc
        bestM[i] = bm
        cuts[i] = c_list
    mapping = set()
    st = [name_to_idx[nm] for nm in outputs if nm in name_to_idx]
    vis = set()
    while st:
        u = st.pop()
        if u in vis: continue
        vis.add(u)
        bm = bestM[u]
        if bm is None: continue
        mapping.add(u)
        t = bm
        while t:
            lsb = t & -t
            j = lsb.bit_length() - 1
            t ^= lsb
            if j in PI or topo_nodes[j].const_val is not None: continue
            if j not in vis:
                st.append(j)
    mapped = sorted(mapping)
    with open(solution_file, 'w') as f:
        f.write('.model ' + model + '\n')
        f.write('.inputs ' + ' '.join(inputs) + '\n')
        f.write('.outputs ' + ' '.join(outputs) + '\n')
        for i in mapped:
            nd = topo_nodes[i]
            bm = bestM[i]
            leaves = [j for j in range(N) if (bm >> j) & 1]
            inputs_l = [idx_to_name[j] for j in leaves]
            k = len(inputs_l)
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
            for t, j in enumerate(leaves):
                val[j] = masks[t]
            seen = set(leaves)
            stk = [i]
            cone = []
            while stk:
                u = stk.pop()
                if u in seen: continue
                seen.add(u)
                cone.append(u)
                for p in topo_nodes[u].fanins:
                    pj = name_to_idx.get(p.name)
                    if pj is not None and pj not in seen:
                        stk.append(pj)
            cone.sort()
            for j in cone:
                v = topo_nodes[j]
                if v.const_val is not None:
                    val[j] = full if v.const_val == 1 else 0
                else:
                    if v.patterns_zero:
                        zm = 0
                        for p in v.patterns_zero:
                            mm = full
                            for t, ch in enumerate(p):
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
                            for t, ch in enumerate(p):
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
            f.write('.names ' + ' '.join(inputs_l) + ' ' + nd.name + '\n')
            for j in range(Np):
                if (root >> j) & 1:
                    pat = ''.join('1' if (j >> t) & 1 else '0' for t in range(k))
                    f.write(pat + ' 1\n')
        f.write('.end\n')

