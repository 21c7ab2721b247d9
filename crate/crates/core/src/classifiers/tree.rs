//! CART trees: the base learner shared by Extra Trees (classification,
//! random or exhaustive Gini splits) and Gradient Boosting (regression,
//! exhaustive squared-error splits on presorted columns).

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Routing rule: `x[feature] <= threshold` goes left.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Node {
    Split { feature: u32, threshold: f64, left: u32, right: u32 },
    Leaf { leaf: u32 },
}

/// A fitted binary tree. Leaves own `leaf_width` values each: class
/// probabilities for classification trees, a single prediction for
/// regression trees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    nodes: Vec<Node>,
    leaf_width: usize,
    leaf_values: Vec<f64>,
}

impl Tree {
    /// A tree made of one leaf.
    pub fn leaf(values: Vec<f64>) -> Self {
        Tree { nodes: vec![Node::Leaf { leaf: 0 }], leaf_width: values.len(), leaf_values: values }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn leaf_width(&self) -> usize {
        self.leaf_width
    }

    pub fn n_leaves(&self) -> usize {
        self.leaf_values.len() / self.leaf_width.max(1)
    }

    pub fn leaf_values(&self, leaf: usize) -> &[f64] {
        &self.leaf_values[leaf * self.leaf_width..(leaf + 1) * self.leaf_width]
    }

    pub fn leaf_values_mut(&mut self, leaf: usize) -> &mut [f64] {
        let w = self.leaf_width;
        &mut self.leaf_values[leaf * w..(leaf + 1) * w]
    }

    /// Index of the leaf `x` lands in.
    #[inline]
    pub fn leaf_index(&self, x: &[f64]) -> usize {
        let mut i = 0usize;
        loop {
            match self.nodes[i] {
                Node::Split { feature, threshold, left, right } => {
                    i = if x[feature as usize] <= threshold { left as usize } else { right as usize };
                }
                Node::Leaf { leaf } => return leaf as usize,
            }
        }
    }

    #[inline]
    pub fn predict(&self, x: &[f64]) -> &[f64] {
        self.leaf_values(self.leaf_index(x))
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Split { left, right, .. } => 1 + walk(nodes, left as usize).max(walk(nodes, right as usize)),
                Node::Leaf { .. } => 0,
            }
        }
        walk(&self.nodes, 0)
    }

    /// Structural sanity: indices in range, every leaf referenced once.
    pub fn validate(&self) -> Result<(), String> {
        if self.leaf_width == 0 || self.leaf_values.len() % self.leaf_width != 0 {
            return Err("leaf value table has the wrong size".into());
        }
        let mut seen = vec![false; self.n_leaves()];
        for node in &self.nodes {
            match *node {
                Node::Split { left, right, threshold, .. } => {
                    if left as usize >= self.nodes.len() || right as usize >= self.nodes.len() || !threshold.is_finite() {
                        return Err("split references a missing child".into());
                    }
                }
                Node::Leaf { leaf } => {
                    let slot = seen.get_mut(leaf as usize).ok_or("leaf index out of range")?;
                    *slot = true;
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err("unreferenced leaf".into());
        }
        Ok(())
    }
}

/// How classification splits are chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Splitter {
    /// Extra-Trees rule: draw features in random order, one uniform threshold
    /// in `[min, max)` per non-constant feature, stop after `k_features`
    /// candidates, keep the lowest weighted Gini.
    Random { k_features: usize },
    /// Exhaustive search over midpoints of every feature.
    Best,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassificationParams {
    pub splitter: Splitter,
    pub min_samples_split: usize,
    pub max_depth: Option<usize>,
}

fn gini_weighted(counts: &[usize], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    let sq: f64 = counts.iter().map(|&c| (c as f64) * (c as f64)).sum();
    // n · gini = n − Σc²/n
    n - sq / n
}

fn midpoint(a: f64, b: f64) -> f64 {
    let mid = a + (b - a) / 2.0;
    if mid >= b {
        a
    } else {
        mid
    }
}

/// Grows a classification tree on `rows` of `x`. Labels are class indices in
/// `0..n_classes`; leaves hold class frequencies.
pub fn fit_classification<R: AsRef<[f64]>, G: Rng + ?Sized>(
    x: &[R],
    y: &[usize],
    n_classes: usize,
    rows: &mut [usize],
    params: &ClassificationParams,
    rng: &mut G,
) -> Tree {
    let n_features = x.first().map(|r| r.as_ref().len()).unwrap_or(0);
    let mut nodes: Vec<Node> = Vec::new();
    let mut leaf_values: Vec<f64> = Vec::new();
    let mut feature_order: Vec<usize> = (0..n_features).collect();
    // (node slot, start, end, depth)
    let mut stack = vec![(0usize, 0usize, rows.len(), 0usize)];
    nodes.push(Node::Leaf { leaf: 0 });

    while let Some((slot, start, end, depth)) = stack.pop() {
        let part = &mut rows[start..end];
        let n = part.len();
        let mut counts = vec![0usize; n_classes];
        for &r in part.iter() {
            counts[y[r]] += 1;
        }
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let depth_capped = params.max_depth.is_some_and(|d| depth >= d);

        let split = if pure || n < params.min_samples_split.max(2) || depth_capped {
            None
        } else {
            match params.splitter {
                Splitter::Random { k_features } => {
                    random_split(x, y, n_classes, part, k_features, &mut feature_order, rng)
                }
                Splitter::Best => best_gini_split(x, y, n_classes, part),
            }
        };

        match split {
            Some((feature, threshold)) => {
                let mid = partition(part, |r| x[r].as_ref()[feature] <= threshold);
                debug_assert!(mid > 0 && mid < n);
                let left = nodes.len();
                nodes.push(Node::Leaf { leaf: 0 });
                nodes.push(Node::Leaf { leaf: 0 });
                nodes[slot] =
                    Node::Split { feature: feature as u32, threshold, left: left as u32, right: left as u32 + 1 };
                stack.push((left + 1, start + mid, end, depth + 1));
                stack.push((left, start, start + mid, depth + 1));
            }
            None => {
                let leaf = leaf_values.len() / n_classes;
                leaf_values.extend(counts.iter().map(|&c| c as f64 / n as f64));
                nodes[slot] = Node::Leaf { leaf: leaf as u32 };
            }
        }
    }
    Tree { nodes, leaf_width: n_classes, leaf_values }
}

/// In-place partition; returns the number of rows that satisfied `pred`.
fn partition(rows: &mut [usize], pred: impl Fn(usize) -> bool) -> usize {
    let mut mid = 0;
    for i in 0..rows.len() {
        if pred(rows[i]) {
            rows.swap(i, mid);
            mid += 1;
        }
    }
    mid
}

fn random_split<R: AsRef<[f64]>, G: Rng + ?Sized>(
    x: &[R],
    y: &[usize],
    n_classes: usize,
    rows: &[usize],
    k_features: usize,
    feature_order: &mut [usize],
    rng: &mut G,
) -> Option<(usize, f64)> {
    let d = feature_order.len();
    let mut best: Option<(f64, usize, f64)> = None;
    let mut drawn = 0;
    let mut left = vec![0usize; n_classes];
    let mut right = vec![0usize; n_classes];
    for i in 0..d {
        if drawn >= k_features {
            break;
        }
        let j = rng.random_range(i..d);
        feature_order.swap(i, j);
        let f = feature_order[i];
        let (lo, hi) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| {
            let v = x[r].as_ref()[f];
            (lo.min(v), hi.max(v))
        });
        if hi <= lo {
            continue;
        }
        drawn += 1;
        let mut threshold = rng.random_range(lo..hi);
        if threshold >= hi {
            threshold = lo;
        }
        left.iter_mut().for_each(|c| *c = 0);
        right.iter_mut().for_each(|c| *c = 0);
        let mut n_left = 0;
        for &r in rows {
            if x[r].as_ref()[f] <= threshold {
                left[y[r]] += 1;
                n_left += 1;
            } else {
                right[y[r]] += 1;
            }
        }
        let impurity = gini_weighted(&left, n_left) + gini_weighted(&right, rows.len() - n_left);
        if best.is_none_or(|(b, _, _)| impurity < b) {
            best = Some((impurity, f, threshold));
        }
    }
    best.map(|(_, f, t)| (f, t))
}

fn best_gini_split<R: AsRef<[f64]>>(x: &[R], y: &[usize], n_classes: usize, rows: &[usize]) -> Option<(usize, f64)> {
    let d = x[rows[0]].as_ref().len();
    let n = rows.len();
    let mut total = vec![0usize; n_classes];
    for &r in rows {
        total[y[r]] += 1;
    }
    let mut best: Option<(f64, usize, f64)> = None;
    let mut order: Vec<usize> = rows.to_vec();
    let mut left = vec![0usize; n_classes];
    for f in 0..d {
        order.sort_by(|&a, &b| x[a].as_ref()[f].total_cmp(&x[b].as_ref()[f]).then(a.cmp(&b)));
        left.iter_mut().for_each(|c| *c = 0);
        for i in 0..n - 1 {
            left[y[order[i]]] += 1;
            let (a, b) = (x[order[i]].as_ref()[f], x[order[i + 1]].as_ref()[f]);
            if b <= a {
                continue;
            }
            let right: Vec<usize> = total.iter().zip(&left).map(|(t, l)| t - l).collect();
            let impurity = gini_weighted(&left, i + 1) + gini_weighted(&right, n - i - 1);
            if best.is_none_or(|(bi, _, _)| impurity < bi) {
                best = Some((impurity, f, midpoint(a, b)));
            }
        }
    }
    best.map(|(_, f, t)| (f, t))
}

/// Column orders computed once per training set and reused by every
/// regression tree fitted on it.
#[derive(Debug, Clone)]
pub struct Presorted {
    /// `order[f]` lists row indices by ascending `x[·][f]`, ties by index.
    order: Vec<Vec<u32>>,
    n_rows: usize,
}

impl Presorted {
    pub fn new<R: AsRef<[f64]>>(x: &[R]) -> Self {
        let d = x.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let order = (0..d)
            .map(|f| {
                let mut idx: Vec<u32> = (0..x.len() as u32).collect();
                idx.sort_by(|&a, &b| x[a as usize].as_ref()[f].total_cmp(&x[b as usize].as_ref()[f]).then(a.cmp(&b)));
                idx
            })
            .collect();
        Presorted { order, n_rows: x.len() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionParams {
    pub max_depth: usize,
    pub min_samples_split: usize,
}

#[derive(Clone, Copy)]
struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
}

/// Grows a depth-limited least-squares regression tree, level by level over
/// presorted columns. Leaves receive the target mean; the row-to-leaf map is
/// returned so callers can overwrite leaf values (boosting does a Newton step).
pub fn fit_regression<R: AsRef<[f64]>>(
    x: &[R],
    target: &[f64],
    presorted: &Presorted,
    params: &RegressionParams,
) -> (Tree, Vec<u32>) {
    let n = presorted.n_rows;
    debug_assert_eq!(n, target.len());
    const DONE: u32 = u32::MAX;

    // node slot for each row while its node is still growing
    let mut node_of: Vec<u32> = vec![0; n];
    let mut nodes = vec![Node::Leaf { leaf: 0 }];
    let mut frontier: Vec<usize> = vec![0];
    // per node: (sum, count)
    let mut stats: Vec<(f64, usize)> = vec![(target.iter().sum(), n)];
    let mut leaf_sums: Vec<(f64, usize)> = Vec::new();

    for depth in 0..=params.max_depth {
        if frontier.is_empty() {
            break;
        }
        let splittable: Vec<bool> = frontier
            .iter()
            .map(|&s| depth < params.max_depth && stats[s].1 >= params.min_samples_split.max(2))
            .collect();
        let mut best: Vec<Option<Candidate>> = vec![None; frontier.len()];

        if splittable.iter().any(|&b| b) {
            // position of each slot inside the frontier
            let mut pos = vec![usize::MAX; nodes.len()];
            for (p, &s) in frontier.iter().enumerate() {
                pos[s] = p;
            }
            let mut acc: Vec<(f64, usize, f64)> = vec![(0.0, 0, f64::NAN); frontier.len()];
            for (f, order) in presorted.order.iter().enumerate() {
                acc.iter_mut().for_each(|a| *a = (0.0, 0, f64::NAN));
                for &r in order {
                    let r = r as usize;
                    let slot = node_of[r];
                    if slot == DONE {
                        continue;
                    }
                    let p = pos[slot as usize];
                    if !splittable[p] {
                        continue;
                    }
                    let v = x[r].as_ref()[f];
                    let (left_sum, left_n, last) = acc[p];
                    if left_n > 0 && v > last {
                        let (sum, count) = stats[frontier[p]];
                        let right_n = count - left_n;
                        let right_sum = sum - left_sum;
                        let gain = left_sum * left_sum / left_n as f64 + right_sum * right_sum / right_n as f64
                            - sum * sum / count as f64;
                        if gain > 0.0 && best[p].is_none_or(|b| gain > b.gain) {
                            best[p] = Some(Candidate { gain, feature: f, threshold: midpoint(last, v) });
                        }
                    }
                    acc[p] = (left_sum + target[r], left_n + 1, v);
                }
            }
        }

        let mut next = Vec::new();
        let mut child_of: Vec<Option<(usize, usize, usize, f64)>> = vec![None; frontier.len()];
        for (p, &slot) in frontier.iter().enumerate() {
            match best[p] {
                Some(c) => {
                    let left = nodes.len();
                    nodes.push(Node::Leaf { leaf: 0 });
                    nodes.push(Node::Leaf { leaf: 0 });
                    stats.push((0.0, 0));
                    stats.push((0.0, 0));
                    nodes[slot] = Node::Split {
                        feature: c.feature as u32,
                        threshold: c.threshold,
                        left: left as u32,
                        right: left as u32 + 1,
                    };
                    child_of[p] = Some((left, left + 1, c.feature, c.threshold));
                    next.push(left);
                    next.push(left + 1);
                }
                None => {
                    nodes[slot] = Node::Leaf { leaf: leaf_sums.len() as u32 };
                    leaf_sums.push(stats[slot]);
                }
            }
        }

        let mut pos = vec![usize::MAX; nodes.len()];
        for (p, &s) in frontier.iter().enumerate() {
            pos[s] = p;
        }
        for r in 0..n {
            let slot = node_of[r];
            if slot == DONE {
                continue;
            }
            match child_of[pos[slot as usize]] {
                Some((l, rt, f, t)) => {
                    let child = if x[r].as_ref()[f] <= t { l } else { rt };
                    node_of[r] = child as u32;
                    stats[child].0 += target[r];
                    stats[child].1 += 1;
                }
                None => node_of[r] = DONE,
            }
        }
        frontier = next;
    }

    let leaf_values: Vec<f64> =
        leaf_sums.iter().map(|&(s, c)| if c == 0 { 0.0 } else { s / c as f64 }).collect();
    let tree = Tree { nodes, leaf_width: 1, leaf_values };
    // every row's leaf, through the finished tree
    let row_leaf = (0..n).map(|r| tree.leaf_index(x[r].as_ref()) as u32).collect();
    (tree, row_leaf)
}

/// Shuffled copy of `0..n`.
/// Shallow single-output trees stored as complete binary trees, so that
/// evaluation is a fixed number of compare-and-index steps with no
/// data-dependent branches. A leaf above the bottom level is replicated into
/// every bottom slot beneath it, and its padding splits compare against `+∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct PackedForest {
    depth: usize,
    features: Vec<u32>,
    thresholds: Vec<f64>,
    leaves: Vec<f64>,
}

impl PackedForest {
    /// Deeper trees would cost more in padding than they save.
    pub const MAX_DEPTH: usize = 6;

    /// `None` when a tree is too deep or has multi-valued leaves.
    pub fn new(trees: &[Tree]) -> Option<Self> {
        if trees.iter().any(|t| t.leaf_width != 1) {
            return None;
        }
        let depth = trees.iter().map(Tree::depth).max().unwrap_or(0);
        if depth > Self::MAX_DEPTH {
            return None;
        }
        let internal = (1usize << depth) - 1;
        let mut packed = PackedForest {
            depth,
            features: vec![0; internal * trees.len()],
            thresholds: vec![f64::INFINITY; internal * trees.len()],
            leaves: vec![0.0; (internal + 1) * trees.len()],
        };
        for (t, tree) in trees.iter().enumerate() {
            packed.fill(t, tree, 0, 0, 0);
        }
        Some(packed)
    }

    fn fill(&mut self, t: usize, tree: &Tree, node: usize, slot: usize, level: usize) {
        let internal = (1usize << self.depth) - 1;
        if level == self.depth {
            let Node::Leaf { leaf } = tree.nodes[node] else { unreachable!("depth bounded above") };
            self.leaves[t * (internal + 1) + slot - internal] = tree.leaf_values(leaf as usize)[0];
            return;
        }
        match tree.nodes[node] {
            Node::Split { feature, threshold, left, right } => {
                self.features[t * internal + slot] = feature;
                self.thresholds[t * internal + slot] = threshold;
                self.fill(t, tree, left as usize, 2 * slot + 1, level + 1);
                self.fill(t, tree, right as usize, 2 * slot + 2, level + 1);
            }
            Node::Leaf { .. } => {
                self.fill(t, tree, node, 2 * slot + 1, level + 1);
                self.fill(t, tree, node, 2 * slot + 2, level + 1);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.leaves.len() >> self.depth
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    /// Same value as `trees[t].predict(x)[0]`.
    #[inline]
    pub fn eval(&self, t: usize, x: &[f64]) -> f64 {
        let internal = (1usize << self.depth) - 1;
        let features = &self.features[t * internal..(t + 1) * internal];
        let thresholds = &self.thresholds[t * internal..(t + 1) * internal];
        let mut i = 0;
        for _ in 0..self.depth {
            let right = !(x[features[i] as usize] <= thresholds[i]);
            i = 2 * i + 1 + right as usize;
        }
        self.leaves[t * (internal + 1) + i - internal]
    }
}

pub fn shuffled_indices<G: Rng + ?Sized>(n: usize, rng: &mut G) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    v
}
