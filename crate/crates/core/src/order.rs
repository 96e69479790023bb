//! The word problem and element orders, by coinduction over sections.
//!
//! `is_identity` closes `{w}` under sections: `w = 1` iff no element of the
//! closure moves level 1. `order` builds the graph whose nodes are words and
//! whose edges are `u -> u^p` (weight 1, when `u` moves level 1) or
//! `u -> u_x` (weight 0, when `u` fixes level 1). The order of every node is
//! `p^k(u)` with `k(u) = max(weight + k(child))` over its edges; the least
//! solution of that system is exact on a finite graph, and any reachable
//! cycle through a weight-1 edge forces infinite order.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ggs::Ggs;
use crate::tree::Vertex;
use crate::word::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Distinct words a closure may visit.
    pub closure_cap: usize,
    /// Longest word (in syllables) any step may produce.
    pub word_len_cap: usize,
    /// Longest chain of power/section steps from the start word.
    pub depth_cap: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            closure_cap: 100_000,
            word_len_cap: 10_000,
            depth_cap: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "limit", content = "cap", rename_all = "snake_case")]
pub enum Exhausted {
    #[error("closure exceeded {0} words")]
    Closure(usize),
    #[error("word length exceeded {0} syllables")]
    WordLength(usize),
    #[error("recursion depth exceeded {0}")]
    Depth(usize),
}

/// Results remembered across calls on the same group.
#[derive(Debug, Default, Clone)]
pub struct Memo {
    identity: HashMap<Word, bool>,
    finite: HashMap<Word, u32>,
}

impl Memo {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.identity.len() + self.finite.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    /// Replace `u` by `u^p`.
    Power,
    /// Replace `u` by its section at the given letter (1-based).
    Section(u32),
}

/// `element^(p^power)` fixes `vertex` and has section `element` there.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InfiniteCertificate {
    /// Steps from the queried word to `element`.
    pub prefix: Vec<Step>,
    pub element: Word,
    /// Steps of the cycle from `element` back to itself.
    pub cycle: Vec<Step>,
    pub power: u32,
    pub vertex: Vertex,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum OrderResult {
    /// Order `p^exponent`.
    Finite { exponent: u32 },
    Infinite { certificate: Box<InfiniteCertificate> },
    Unknown { exhausted: Exhausted },
}

impl OrderResult {
    pub fn is_finite(&self) -> bool {
        matches!(self, OrderResult::Finite { .. })
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, OrderResult::Infinite { .. })
    }
}

impl Ggs {
    pub fn is_identity(&self, w: &Word) -> Result<bool, Exhausted> {
        self.is_identity_with(w, &Budget::default(), &mut Memo::new())
    }

    pub fn is_identity_with(
        &self,
        w: &Word,
        budget: &Budget,
        memo: &mut Memo,
    ) -> Result<bool, Exhausted> {
        if w.is_empty() {
            return Ok(true);
        }
        if let Some(&known) = memo.identity.get(w) {
            return Ok(known);
        }
        let mut seen: HashSet<Word> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(w.clone());
        queue.push_back(w.clone());
        while let Some(u) = queue.pop_front() {
            match memo.identity.get(&u) {
                Some(true) => continue,
                Some(false) => {
                    memo.identity.insert(w.clone(), false);
                    return Ok(false);
                }
                None => {}
            }
            if self.root_exponent(&u) != 0 {
                memo.identity.insert(u, false);
                memo.identity.insert(w.clone(), false);
                return Ok(false);
            }
            for s in self.decompose(&u).sections {
                if s.is_empty() || seen.contains(&s) {
                    continue;
                }
                if s.len() > budget.word_len_cap {
                    return Err(Exhausted::WordLength(budget.word_len_cap));
                }
                if seen.len() >= budget.closure_cap {
                    return Err(Exhausted::Closure(budget.closure_cap));
                }
                seen.insert(s.clone());
                queue.push_back(s);
            }
        }
        // Every element of a section-closed set that fixes level 1 is trivial.
        for u in seen {
            memo.identity.insert(u, true);
        }
        Ok(true)
    }

    /// Equality in the group.
    pub fn words_equal(&self, u: &Word, v: &Word) -> Result<bool, Exhausted> {
        if u == v {
            return Ok(true);
        }
        self.is_identity(&u.mul(&v.inverse()))
    }

    pub fn order(&self, w: &Word) -> OrderResult {
        self.order_with(w, &Budget::default(), &mut Memo::new())
    }

    pub fn order_with(&self, w: &Word, budget: &Budget, memo: &mut Memo) -> OrderResult {
        let mut graph = OrderGraph::build(self, w, budget, memo);
        let result = graph.solve(self);
        if let OrderResult::Finite { .. } = result {
            for (node, k) in graph.nodes.iter().zip(graph.finite_exponents()) {
                if let Some(k) = k {
                    memo.finite.insert(node.word.clone(), k);
                }
            }
        }
        result
    }

    /// Re-derive an infinite-order certificate from scratch: follow `prefix`
    /// from `w`, then check that `element^(p^power)` fixes `vertex` with section `element`.
    pub fn check_certificate(&self, w: &Word, cert: &InfiniteCertificate) -> bool {
        let p = self.p() as i64;
        let mut cur = w.clone();
        for step in &cert.prefix {
            cur = match *step {
                Step::Power => cur.pow(p),
                Step::Section(x) => {
                    if self.root_exponent(&cur) != 0 {
                        return false;
                    }
                    self.section(&cur, (x - 1) as usize)
                }
            };
        }
        if cur != cert.element || cert.power == 0 {
            return false;
        }
        let mut big = cert.element.clone();
        for _ in 0..cert.power {
            big = big.pow(p);
        }
        for &x in cert.vertex.letters() {
            if self.root_exponent(&big) != 0 {
                return false;
            }
            big = self.section(&big, (x - 1) as usize);
        }
        big == cert.element
    }
}

#[derive(Debug)]
enum Edges {
    /// The empty word.
    Leaf,
    Known(u32),
    Power(usize),
    Sections(Vec<(u32, usize)>),
    /// Not expanded: budget ran out first.
    Open,
}

#[derive(Debug)]
struct Node {
    word: Word,
    edges: Edges,
}

struct OrderGraph {
    nodes: Vec<Node>,
    exhausted: Option<Exhausted>,
    exponents: Vec<Option<u32>>,
}

impl OrderGraph {
    fn build(g: &Ggs, w: &Word, budget: &Budget, memo: &Memo) -> Self {
        let p = g.p() as i64;
        let mut nodes = vec![Node {
            word: w.clone(),
            edges: Edges::Open,
        }];
        let mut index: HashMap<Word, usize> = HashMap::from([(w.clone(), 0)]);
        let mut depth = vec![0usize];
        let mut queue = VecDeque::from([0usize]);
        let mut exhausted = None;

        let mut intern = |word: Word,
                          d: usize,
                          nodes: &mut Vec<Node>,
                          depth: &mut Vec<usize>,
                          queue: &mut VecDeque<usize>|
         -> Result<usize, Exhausted> {
            if let Some(&i) = index.get(&word) {
                return Ok(i);
            }
            if word.len() > budget.word_len_cap {
                return Err(Exhausted::WordLength(budget.word_len_cap));
            }
            if nodes.len() >= budget.closure_cap {
                return Err(Exhausted::Closure(budget.closure_cap));
            }
            if d > budget.depth_cap {
                return Err(Exhausted::Depth(budget.depth_cap));
            }
            let i = nodes.len();
            index.insert(word.clone(), i);
            nodes.push(Node {
                word,
                edges: Edges::Open,
            });
            depth.push(d);
            queue.push_back(i);
            Ok(i)
        };

        'bfs: while let Some(u) = queue.pop_front() {
            let word = nodes[u].word.clone();
            let d = depth[u];
            if word.is_empty() {
                nodes[u].edges = Edges::Leaf;
                continue;
            }
            if let Some(&k) = memo.finite.get(&word) {
                nodes[u].edges = Edges::Known(k);
                continue;
            }
            if memo.identity.get(&word) == Some(&true) {
                nodes[u].edges = Edges::Known(0);
                continue;
            }
            if g.root_exponent(&word) != 0 {
                let next = word.pow(p);
                match intern(next, d + 1, &mut nodes, &mut depth, &mut queue) {
                    Ok(c) => nodes[u].edges = Edges::Power(c),
                    Err(e) => {
                        exhausted = Some(e);
                        break 'bfs;
                    }
                }
            } else {
                let mut children = Vec::new();
                for (x, s) in g.decompose(&word).sections.into_iter().enumerate() {
                    if s.is_empty() {
                        continue;
                    }
                    match intern(s, d + 1, &mut nodes, &mut depth, &mut queue) {
                        Ok(c) => children.push((x as u32 + 1, c)),
                        Err(e) => {
                            exhausted = Some(e);
                            break 'bfs;
                        }
                    }
                }
                nodes[u].edges = Edges::Sections(children);
            }
        }
        OrderGraph {
            nodes,
            exhausted,
            exponents: Vec::new(),
        }
    }

    fn successors(&self, u: usize) -> Vec<(usize, u32, Step)> {
        match &self.nodes[u].edges {
            Edges::Power(c) => vec![(*c, 1, Step::Power)],
            Edges::Sections(cs) => cs.iter().map(|&(x, c)| (c, 0, Step::Section(x))).collect(),
            _ => Vec::new(),
        }
    }

    /// Strongly connected components in reverse topological order (sinks first).
    fn sccs(&self) -> Vec<Vec<usize>> {
        let n = self.nodes.len();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut out = Vec::new();
        let mut counter = 0;
        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            // (node, next successor position)
            let mut call: Vec<(usize, usize)> = vec![(root, 0)];
            index[root] = counter;
            low[root] = counter;
            counter += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut pos)) = call.last_mut() {
                let succ = self.successors(v);
                if *pos < succ.len() {
                    let w = succ[*pos].0;
                    *pos += 1;
                    if index[w] == usize::MAX {
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == index[v] {
                        let mut comp = Vec::new();
                        loop {
                            let x = stack.pop().expect("tarjan stack");
                            on_stack[x] = false;
                            comp.push(x);
                            if x == v {
                                break;
                            }
                        }
                        out.push(comp);
                    }
                }
            }
        }
        out
    }

    fn solve(&mut self, g: &Ggs) -> OrderResult {
        let comps = self.sccs();
        let mut comp_of = vec![0usize; self.nodes.len()];
        for (ci, comp) in comps.iter().enumerate() {
            for &u in comp {
                comp_of[u] = ci;
            }
        }
        let mut value = vec![Value::Finite(0); comps.len()];
        let mut self_replicating = vec![false; comps.len()];
        for (ci, comp) in comps.iter().enumerate() {
            let mut v = Value::Finite(0);
            for &u in comp {
                match &self.nodes[u].edges {
                    Edges::Leaf => {}
                    Edges::Known(k) => v = v.join(Value::Finite(*k)),
                    Edges::Open => v = v.join(Value::Unknown),
                    _ => {}
                }
                for (c, weight, _) in self.successors(u) {
                    if comp_of[c] == ci {
                        if weight > 0 {
                            self_replicating[ci] = true;
                        }
                    } else {
                        v = v.join(value[comp_of[c]].shifted(weight));
                    }
                }
            }
            value[ci] = if self_replicating[ci] { Value::Infinite } else { v };
        }
        self.exponents = (0..self.nodes.len())
            .map(|u| match value[comp_of[u]] {
                Value::Finite(k) => Some(k),
                _ => None,
            })
            .collect();
        match value[comp_of[0]] {
            Value::Finite(k) => OrderResult::Finite { exponent: k },
            Value::Unknown => OrderResult::Unknown {
                exhausted: self.exhausted.clone().unwrap_or(Exhausted::Closure(self.nodes.len())),
            },
            Value::Infinite => OrderResult::Infinite {
                certificate: Box::new(self.certificate(g, &comp_of, &self_replicating)),
            },
        }
    }

    fn certificate(&self, g: &Ggs, comp_of: &[usize], self_replicating: &[bool]) -> InfiniteCertificate {
        // shortest path into a self-replicating component
        let entry = self
            .bfs_path(0, |u| self_replicating[comp_of[u]], |_| true)
            .expect("reachable self-replicating component");
        let z = entry.0;
        let ci = comp_of[z];
        let (u, c) = (0..self.nodes.len())
            .filter(|&u| comp_of[u] == ci)
            .find_map(|u| match self.nodes[u].edges {
                Edges::Power(c) if comp_of[c] == ci => Some((u, c)),
                _ => None,
            })
            .expect("power edge inside the component");
        let inside = |x: usize| comp_of[x] == ci;
        let (_, to_u) = self.bfs_path(z, |x| x == u, inside).expect("strongly connected");
        let (_, back) = self.bfs_path(c, |x| x == u, inside).expect("strongly connected");
        let mut prefix = entry.1;
        prefix.extend(to_u);
        let mut cycle = vec![Step::Power];
        cycle.extend(back);
        let power = cycle.iter().filter(|s| **s == Step::Power).count() as u32;
        let letters: Vec<u32> = cycle
            .iter()
            .filter_map(|s| match s {
                Step::Section(x) => Some(*x),
                Step::Power => None,
            })
            .collect();
        InfiniteCertificate {
            prefix,
            element: self.nodes[u].word.clone(),
            cycle,
            power,
            vertex: Vertex::new(g.p(), letters).expect("letters in range"),
        }
    }

    fn bfs_path(
        &self,
        from: usize,
        goal: impl Fn(usize) -> bool,
        allowed: impl Fn(usize) -> bool,
    ) -> Option<(usize, Vec<Step>)> {
        let mut prev: HashMap<usize, (usize, Step)> = HashMap::new();
        let mut queue = VecDeque::from([from]);
        let mut seen = HashSet::from([from]);
        while let Some(u) = queue.pop_front() {
            if goal(u) {
                let mut steps = Vec::new();
                let mut cur = u;
                while cur != from {
                    let (pu, step) = prev[&cur];
                    steps.push(step);
                    cur = pu;
                }
                steps.reverse();
                return Some((u, steps));
            }
            for (c, _, step) in self.successors(u) {
                if allowed(c) && seen.insert(c) {
                    prev.insert(c, (u, step));
                    queue.push_back(c);
                }
            }
        }
        None
    }

    fn finite_exponents(&self) -> Vec<Option<u32>> {
        self.exponents.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Value {
    Finite(u32),
    Unknown,
    Infinite,
}

impl Value {
    fn join(self, other: Value) -> Value {
        use Value::*;
        match (self, other) {
            (Infinite, _) | (_, Infinite) => Infinite,
            (Unknown, _) | (_, Unknown) => Unknown,
            (Finite(a), Finite(b)) => Finite(a.max(b)),
        }
    }

    fn shifted(self, w: u32) -> Value {
        match self {
            Value::Finite(k) => Value::Finite(k + w),
            other => other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(p: u32, e: &[i64]) -> Ggs {
        Ggs::with_depth_cap(p, e, 6).unwrap()
    }

    #[test]
    fn unknown_results_serialize() {
        let r = OrderResult::Unknown {
            exhausted: Exhausted::Closure(1),
        };
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v, serde_json::json!({ "tag": "unknown", "exhausted": { "limit": "closure", "cap": 1 } }));
    }

    #[test]
    fn word_problem_examples() {
        for (p, e) in [(3u32, vec![1i64, 1]), (5, vec![1, 2, 2, 1]), (7, vec![1, 0, 0, 0, 0, 3])] {
            let grp = g(p, &e);
            // b^p and y_(p-1)...y_0 already collapse in the C_p * C_p normal form
            assert!(grp.is_identity(&grp.b().pow(p as i64)).unwrap());
            assert!(!grp.is_identity(&grp.a()).unwrap());
            let prod = (0..p as i64)
                .rev()
                .fold(grp.identity(), |acc, i| acc.mul(&grp.y_i(i)));
            assert!(grp.is_identity(&prod).unwrap(), "y_(p-1)...y_0 for p={p}");
            assert!(!grp.is_identity(&Word::comm(&grp.a(), &grp.b())).unwrap());
        }
    }

    #[test]
    fn identity_closure_is_budgeted() {
        let grp = g(3, &[1, 1]);
        let w = grp.parse("[b, a]^5 [b, a^-1]^-5").unwrap();
        let tight = Budget {
            closure_cap: 1,
            ..Budget::default()
        };
        assert_eq!(
            grp.is_identity_with(&w, &tight, &mut Memo::new()),
            Err(Exhausted::Closure(1))
        );
    }

    #[test]
    fn memo_is_consulted() {
        let grp = g(3, &[1, 2]);
        let mut memo = Memo::new();
        let w = grp.parse("[b,a]^3").unwrap();
        let first = grp.is_identity_with(&w, &Budget::default(), &mut memo).unwrap();
        assert!(!memo.is_empty());
        assert_eq!(grp.is_identity_with(&w, &Budget::default(), &mut memo).unwrap(), first);
    }

    #[test]
    fn order_examples() {
        let grp = g(3, &[1, 1]);
        assert_eq!(grp.order(&grp.identity()), OrderResult::Finite { exponent: 0 });
        assert_eq!(grp.order(&grp.a()), OrderResult::Finite { exponent: 1 });
        assert_eq!(grp.order(&grp.b()), OrderResult::Finite { exponent: 1 });
        match grp.order(&grp.y0()) {
            OrderResult::Infinite { certificate } => {
                assert!(certificate.prefix.is_empty());
                assert_eq!(certificate.element, grp.y0());
                assert_eq!(certificate.cycle, vec![Step::Power, Step::Section(3)]);
                assert_eq!(certificate.power, 1);
                assert!(grp.check_certificate(&grp.y0(), &certificate));
            }
            other => panic!("expected infinite, got {other:?}"),
        }
    }

    #[test]
    fn bogus_certificate_rejected() {
        let grp = g(3, &[1, 1]);
        let cert = InfiniteCertificate {
            prefix: vec![],
            element: grp.a(),
            cycle: vec![Step::Power, Step::Section(1)],
            power: 1,
            vertex: Vertex::new(3, vec![1]).unwrap(),
        };
        assert!(!grp.check_certificate(&grp.a(), &cert));
    }

    #[test]
    fn gupta_sidki_elements_are_torsion() {
        let grp = g(3, &[1, 2]);
        for src in ["a b", "a b^-1", "b a b a^-1 b", "[a,b]", "a b a b^-1 a^-1 b"] {
            let w = grp.parse(src).unwrap();
            assert!(grp.order(&w).is_finite(), "{src}");
        }
        assert_eq!(grp.order(&grp.parse("a b").unwrap()), OrderResult::Finite { exponent: 2 });
    }

    #[test]
    fn b_times_a_to_the_sum_self_replicates() {
        // (b a^s)^p has section b a^s at the last vertex when s = e_1 + ... + e_{p-1} != 0
        let grp = g(5, &[1, 0, 0, 0]);
        let w = grp.b().mul(&grp.a_pow(1));
        match grp.order(&w) {
            OrderResult::Infinite { certificate } => assert!(grp.check_certificate(&w, &certificate)),
            other => panic!("expected infinite, got {other:?}"),
        }
    }

    #[test]
    fn order_budget_gives_unknown() {
        let grp = g(3, &[1, 1]);
        let tight = Budget {
            closure_cap: 2,
            ..Budget::default()
        };
        let w = grp.parse("a b a b^-1 a b").unwrap();
        assert!(matches!(
            grp.order_with(&w, &tight, &mut Memo::new()),
            OrderResult::Unknown { .. } | OrderResult::Infinite { .. }
        ));
    }
}
