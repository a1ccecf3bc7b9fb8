use crate::graph::GraphView;

const UNSEEN: u32 = u32::MAX;

struct Tarjan {
    index: Vec<u32>,
    low: Vec<u32>,
    on_stack: Vec<bool>,
    stack: Vec<u32>,
    /// (vertex, its neighbors, position of the next neighbor to explore)
    frames: Vec<(u32, Vec<u32>, usize)>,
    next: u32,
}

impl Tarjan {
    fn open<G: GraphView>(&mut self, graph: &G, v: u32) {
        self.index[v as usize] = self.next;
        self.low[v as usize] = self.next;
        self.next += 1;
        self.stack.push(v);
        self.on_stack[v as usize] = true;
        let mut nb = Vec::new();
        graph.neighbors_into(v, &mut nb);
        self.frames.push((v, nb, 0));
    }
}

/// Number of strongly connected components (iterative Tarjan).
pub fn scc_count<G: GraphView>(graph: &G) -> usize {
    let n = graph.num_vertices();
    let mut t = Tarjan {
        index: vec![UNSEEN; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        frames: Vec::new(),
        next: 0,
    };
    let mut count = 0;
    for root in 0..n as u32 {
        if t.index[root as usize] != UNSEEN {
            continue;
        }
        t.open(graph, root);
        while let Some(frame) = t.frames.last_mut() {
            let v = frame.0;
            if frame.2 < frame.1.len() {
                let w = frame.1[frame.2];
                frame.2 += 1;
                if t.index[w as usize] == UNSEEN {
                    t.open(graph, w);
                } else if t.on_stack[w as usize] {
                    t.low[v as usize] = t.low[v as usize].min(t.index[w as usize]);
                }
                continue;
            }
            t.frames.pop();
            if let Some(&(parent, _, _)) = t.frames.last() {
                t.low[parent as usize] = t.low[parent as usize].min(t.low[v as usize]);
            }
            if t.low[v as usize] == t.index[v as usize] {
                count += 1;
                while let Some(w) = t.stack.pop() {
                    t.on_stack[w as usize] = false;
                    if w == v {
                        break;
                    }
                }
            }
        }
    }
    count
}

/// Vertices with no incoming edge.
pub fn zero_indegree_count<G: GraphView>(graph: &G) -> usize {
    let n = graph.num_vertices();
    let mut has_in = vec![false; n];
    let mut nb = Vec::new();
    for v in 0..n as u32 {
        graph.neighbors_into(v, &mut nb);
        for &w in &nb {
            has_in[w as usize] = true;
        }
    }
    has_in.iter().filter(|&&x| !x).count()
}
