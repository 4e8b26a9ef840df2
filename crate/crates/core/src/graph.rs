//! Connectivity and bridge finding on undirected multigraphs given as edge
//! lists over vertices `0..n`. Parallel edges are distinct edges, so a pair of
//! parallel edges is never a bridge.

/// Number of connected components. An empty vertex set has zero components.
pub fn component_count(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut dsu = DisjointSet::new(n);
    let mut count = n;
    for &(u, v) in edges {
        if dsu.union(u, v) {
            count -= 1;
        }
    }
    count
}

/// True if the graph has at most one component.
pub fn is_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    component_count(n, edges) <= 1
}

/// Flags every edge whose removal increases the number of components.
///
/// Iterative lowpoint search; the parent is tracked by edge index so that a
/// parallel twin of the tree edge counts as a back edge.
pub fn bridges(n: usize, edges: &[(usize, usize)]) -> Vec<bool> {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (e, &(u, v)) in edges.iter().enumerate() {
        if u == v {
            continue;
        }
        adj[u].push((v, e));
        adj[v].push((u, e));
    }

    const UNSEEN: usize = usize::MAX;
    let mut disc = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut is_bridge = vec![false; edges.len()];
    let mut timer = 0usize;
    // (vertex, edge used to reach it, next adjacency position)
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();

    for root in 0..n {
        if disc[root] != UNSEEN {
            continue;
        }
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        stack.push((root, usize::MAX, 0));

        while let Some(&mut (v, via, ref mut pos)) = stack.last_mut() {
            if *pos < adj[v].len() {
                let (w, e) = adj[v][*pos];
                *pos += 1;
                if e == via {
                    continue;
                }
                if disc[w] == UNSEEN {
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push((w, e, 0));
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(parent, _, _)) = stack.last() {
                    low[parent] = low[parent].min(low[v]);
                    if low[v] > disc[parent] {
                        is_bridge[via] = true;
                    }
                }
            }
        }
    }
    is_bridge
}

struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}
