//! Exact γ₂(D): the largest square-lattice point set reachable from a single
//! point in `D` growth steps, where in each step every current point may
//! recruit at most one neighbouring point not yet in the set.
//!
//! A step from `S` adds a set `N` of boundary points that can be matched to
//! distinct points of `S`. Such sets form a transversal matroid, so every
//! inclusion-maximal `N` has the same size (the maximum matching size), and a
//! superset of points is never worse for later steps. The search therefore
//! enumerates only maximal extensions, deduplicated up to lattice symmetry
//! (dihedral group and translation), and prunes the last two steps with the
//! doubling bound `|S_{j+1}| <= 2 |S_j|`.

use std::collections::HashMap;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest depth handled by the exhaustive search.
pub const GAMMA2_MAX_EXACT_DEPTH: usize = 6;

pub type Point = (i32, i32);

const NEIGHBOURS: [Point; 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

/// One recorded growth step: `(recruiter, recruited)` pairs.
pub type GrowthStep = Vec<(Point, Point)>;

/// An optimal growth process found by the search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gamma2Growth {
    pub depth: usize,
    pub value: usize,
    /// Steps in order; step `j` lists the disjoint pairs used at step `j+1`.
    pub steps: Vec<GrowthStep>,
}

impl Gamma2Growth {
    /// The points present after `steps` growth steps, in recruitment order.
    pub fn points_after(&self, steps: usize) -> Vec<Point> {
        let mut pts = vec![(0, 0)];
        for step in self.steps.iter().take(steps) {
            pts.extend(step.iter().map(|&(_, new)| new));
        }
        pts
    }
}

/// `(D+1)^2 + D^2`.
pub fn gamma2_upper_bound(depth: usize) -> usize {
    (depth + 1) * (depth + 1) + depth * depth
}

/// Exact γ₂(D) for `D <= 6`.
pub fn gamma2(depth: usize) -> Result<usize> {
    Ok(gamma2_growth(depth)?.value)
}

/// Exact γ₂(D) together with one optimal growth process.
pub fn gamma2_growth(depth: usize) -> Result<Gamma2Growth> {
    if depth > GAMMA2_MAX_EXACT_DEPTH {
        return Err(Error::Unsupported(format!(
            "exact gamma2 search is limited to D <= {GAMMA2_MAX_EXACT_DEPTH} (got {depth}); \
             use gamma2_upper_bound for larger depths"
        )));
    }
    static CACHE: [OnceLock<Gamma2Growth>; GAMMA2_MAX_EXACT_DEPTH + 1] =
        [const { OnceLock::new() }; GAMMA2_MAX_EXACT_DEPTH + 1];
    let growth = CACHE[depth].get_or_init(|| {
        if depth == 0 {
            Gamma2Growth {
                depth,
                value: 1,
                steps: vec![],
            }
        } else {
            Search::new().run(depth)
        }
    });
    Ok(growth.clone())
}

/// Comparison of the exact set-growth value with the naive count and with
/// the light cone of a circuit built from the optimal growth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gamma2Diagnostic {
    pub depth: usize,
    /// γ₂(D) under the set-growth definition.
    pub set_growth_value: usize,
    /// Light-cone size of the root qubit in the circuit built from the growth,
    /// one layer of disjoint gates per step.
    pub realized_light_cone: usize,
    /// Last step counted loosely: every point with a free neighbour adds one,
    /// even when several points compete for the same neighbour.
    pub naive_count: usize,
    pub consistent: bool,
}

/// Realizes the optimal growth as a circuit and compares it with the naive
/// count, so the two readings of the definition can be told apart.
pub fn gamma2_diagnostic(depth: usize) -> Result<Gamma2Diagnostic> {
    use super::{cnot, Geometry, LayeredCircuit};
    let growth = gamma2_growth(depth)?;
    let coords = growth.points_after(depth);
    let index: HashMap<Point, usize> = coords.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let layers = growth
        .steps
        .iter()
        .map(|step| step.iter().map(|(p, q)| cnot(index[p], index[q])).collect())
        .collect();
    let n = coords.len();
    let circuit = LayeredCircuit::with_layers(n, Geometry::SquareLattice { coords }, layers);
    // a failed validation means the growth needed overlapping gates
    let realized = match circuit.validate() {
        Ok(()) => circuit.light_cone(0)?.support.len(),
        Err(_) => 0,
    };
    let naive_count = if depth == 0 {
        1
    } else {
        let mut search = Search::new();
        while search.levels.len() < depth {
            search.expand_level();
        }
        search
            .levels
            .last()
            .expect("root level")
            .par_iter()
            .map(|node| node.points.len() + active_points(&node.points))
            .max()
            .unwrap_or(1)
    };
    Ok(Gamma2Diagnostic {
        depth,
        set_growth_value: growth.value,
        realized_light_cone: realized,
        naive_count,
        consistent: realized == growth.value && naive_count == growth.value,
    })
}

fn active_points(set: &[Point]) -> usize {
    let members: std::collections::HashSet<Point> = set.iter().copied().collect();
    set.iter()
        .filter(|&&(r, c)| {
            NEIGHBOURS
                .iter()
                .any(|&(dr, dc)| !members.contains(&(r + dr, c + dc)))
        })
        .count()
}

#[derive(Debug, Clone)]
struct Node {
    points: Vec<Point>,
    parent: usize,
    pairs: Vec<(Point, Point)>,
}

struct Search {
    levels: Vec<Vec<Node>>,
}

fn canonical_key(points: &[Point]) -> Vec<u16> {
    let transforms: [fn(Point) -> Point; 8] = [
        |(r, c)| (r, c),
        |(r, c)| (r, -c),
        |(r, c)| (-r, c),
        |(r, c)| (-r, -c),
        |(r, c)| (c, r),
        |(r, c)| (c, -r),
        |(r, c)| (-c, r),
        |(r, c)| (-c, -r),
    ];
    transforms
        .iter()
        .map(|t| {
            let moved: Vec<Point> = points.iter().map(|&p| t(p)).collect();
            let r0 = moved.iter().map(|p| p.0).min().unwrap_or(0);
            let c0 = moved.iter().map(|p| p.1).min().unwrap_or(0);
            let mut key: Vec<u16> = moved
                .iter()
                .map(|&(r, c)| (((r - r0) as u16) << 8) | (c - c0) as u16)
                .collect();
            key.sort_unstable();
            key
        })
        .min()
        .expect("eight transforms")
}

/// Boundary points of `set` and, for each, the indices of adjacent set points.
fn boundary(set: &[Point]) -> (Vec<Point>, Vec<Vec<usize>>) {
    let index: HashMap<Point, usize> = set.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut order: Vec<Point> = Vec::new();
    let mut adj: HashMap<Point, Vec<usize>> = HashMap::new();
    for (i, &(r, c)) in set.iter().enumerate() {
        for (dr, dc) in NEIGHBOURS {
            let q = (r + dr, c + dc);
            if index.contains_key(&q) {
                continue;
            }
            let entry = adj.entry(q).or_insert_with(|| {
                order.push(q);
                Vec::new()
            });
            entry.push(i);
        }
    }
    order.sort_unstable();
    let lists = order.iter().map(|q| adj[q].clone()).collect();
    (order, lists)
}

/// Bipartite matching of boundary candidates (left) into set points (right).
#[derive(Clone)]
struct Matching {
    owner: Vec<Option<usize>>, // set point -> boundary candidate
}

impl Matching {
    fn new(set_len: usize) -> Self {
        Self {
            owner: vec![None; set_len],
        }
    }

    fn augment(&mut self, b: usize, adj: &[Vec<usize>], seen: &mut [bool]) -> bool {
        for &s in &adj[b] {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            match self.owner[s] {
                None => {
                    self.owner[s] = Some(b);
                    return true;
                }
                Some(other) => {
                    if self.augment(other, adj, seen) {
                        self.owner[s] = Some(b);
                        return true;
                    }
                }
            }
        }
        false
    }

    fn try_add(&mut self, b: usize, adj: &[Vec<usize>]) -> bool {
        let mut seen = vec![false; self.owner.len()];
        self.augment(b, adj, &mut seen)
    }

    fn pairs(&self, set: &[Point], cand: &[Point]) -> Vec<(Point, Point)> {
        self.owner
            .iter()
            .enumerate()
            .filter_map(|(s, b)| b.map(|b| (set[s], cand[b])))
            .collect()
    }
}

fn max_matching(set: &[Point]) -> Vec<(Point, Point)> {
    let (cand, adj) = boundary(set);
    let mut m = Matching::new(set.len());
    for b in 0..cand.len() {
        m.try_add(b, &adj);
    }
    m.pairs(set, &cand)
}

/// Calls `visit` with every maximal matchable subset of the boundary.
fn for_each_maximal_extension(set: &[Point], mut visit: impl FnMut(Vec<(Point, Point)>)) {
    let (cand, adj) = boundary(set);
    let rank = {
        let mut m = Matching::new(set.len());
        (0..cand.len()).filter(|&b| m.try_add(b, &adj)).count()
    };
    fn rec(
        i: usize,
        chosen: usize,
        rank: usize,
        m: &Matching,
        cand: &[Point],
        adj: &[Vec<usize>],
        set: &[Point],
        visit: &mut dyn FnMut(Vec<(Point, Point)>),
    ) {
        if chosen == rank {
            visit(m.pairs(set, cand));
            return;
        }
        if chosen + (cand.len() - i) < rank {
            return;
        }
        let mut with = m.clone();
        if with.try_add(i, adj) {
            rec(i + 1, chosen + 1, rank, &with, cand, adj, set, visit);
        }
        rec(i + 1, chosen, rank, m, cand, adj, set, visit);
    }
    rec(
        0,
        0,
        rank,
        &Matching::new(set.len()),
        &cand,
        &adj,
        set,
        &mut visit,
    );
}

fn extension_size(set: &[Point]) -> usize {
    set.len() + max_matching(set).len()
}

impl Search {
    fn new() -> Self {
        Self {
            levels: vec![vec![Node {
                points: vec![(0, 0)],
                parent: 0,
                pairs: vec![],
            }]],
        }
    }

    /// Expands every node of the last level into its maximal extensions.
    fn expand_level(&mut self) {
        let last = self.levels.last().expect("root level");
        let children: Vec<Vec<Node>> = last
            .par_iter()
            .enumerate()
            .map(|(pi, node)| {
                let mut out = Vec::new();
                for_each_maximal_extension(&node.points, |pairs| {
                    let mut points = node.points.clone();
                    points.extend(pairs.iter().map(|&(_, q)| q));
                    out.push(Node {
                        points,
                        parent: pi,
                        pairs,
                    });
                });
                out
            })
            .collect();
        let mut seen: HashMap<Vec<u16>, ()> = HashMap::new();
        let mut level = Vec::new();
        for node in children.into_iter().flatten() {
            if seen.insert(canonical_key(&node.points), ()).is_none() {
                level.push(node);
            }
        }
        self.levels.push(level);
    }

    fn run(mut self, depth: usize) -> Gamma2Growth {
        // Full enumeration up to level depth-2; the last two steps are pruned.
        while self.levels.len() < depth.saturating_sub(1) {
            self.expand_level();
        }
        let base = self.levels.last().expect("root level");
        let base_level = self.levels.len() - 1;

        // Every extension of a base node has the same size.
        let mut order: Vec<(usize, usize)> = base
            .par_iter()
            .enumerate()
            .map(|(i, n)| (extension_size(&n.points), i))
            .collect();
        order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

        if depth == 1 {
            let pairs = max_matching(&base[0].points);
            return Gamma2Growth {
                depth,
                value: 1 + pairs.len(),
                steps: vec![pairs],
            };
        }

        let mut best: Option<(usize, usize, GrowthStep, GrowthStep)> = None;
        for chunk in order.chunks(64) {
            let bound = best.as_ref().map_or(0, |b| b.0);
            if 2 * chunk[0].0 <= bound {
                break;
            }
            let results: Vec<_> = chunk
                .par_iter()
                .filter(|(size, _)| 2 * size > bound)
                .filter_map(|&(_, idx)| {
                    let node = &base[idx];
                    let mut local: Option<(usize, GrowthStep, GrowthStep)> =
                        None;
                    for_each_maximal_extension(&node.points, |pairs| {
                        let mut points = node.points.clone();
                        points.extend(pairs.iter().map(|&(_, q)| q));
                        let last = max_matching(&points);
                        let value = points.len() + last.len();
                        if local.as_ref().is_none_or(|l| value > l.0) {
                            local = Some((value, pairs, last));
                        }
                    });
                    local.map(|(v, p, l)| (v, idx, p, l))
                })
                .collect();
            for r in results {
                if best.as_ref().is_none_or(|b| r.0 > b.0 || (r.0 == b.0 && r.1 < b.1)) {
                    best = Some(r);
                }
            }
        }
        let (value, idx, second_last, last) = best.expect("nonempty search");

        let mut steps = vec![last, second_last];
        let mut level = base_level;
        let mut node_idx = idx;
        while level > 0 {
            let node = &self.levels[level][node_idx];
            steps.push(node.pairs.clone());
            node_idx = node.parent;
            level -= 1;
        }
        steps.reverse();
        Gamma2Growth {
            depth,
            value,
            steps,
        }
    }
}
