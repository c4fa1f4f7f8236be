//! Composite task generation and exact solving: grid shortest path (BFS with
//! optimal-path counting) and small-n TSP (Held-Karp with canonical tie-break).
//!
//! Grid cells are addressed `(col, row)` with `(0, 0)` in the top-left corner
//! and rows increasing downward, matching the rendered image.

use std::collections::BTreeSet;
use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{euclidean_distance, Point};
use crate::scene::{points_admissible, GenConfig, GenError};
use crate::seed::derive_stream;

/// Held-Karp stays exact and fast up to this many objects.
pub const TSP_MAX_OBJECTS: usize = 12;

#[derive(Debug, Error, PartialEq)]
pub enum CompositeError {
    #[error("endpoints are unreachable (obstacles disconnect the grid)")]
    Unreachable,
    #[error("TSP instance too large: {0} objects > {TSP_MAX_OBJECTS}")]
    TooLarge(usize),
    #[error(transparent)]
    Gen(#[from] GenError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub col: i32,
    pub row: i32,
}

impl Cell {
    pub fn new(col: i32, row: i32) -> Self {
        Cell { col, row }
    }

    pub fn manhattan(self, other: Cell) -> i32 {
        (self.col - other.col).abs() + (self.row - other.row).abs()
    }

    pub fn neighbors(self) -> [Cell; 4] {
        [
            Cell::new(self.col + 1, self.row),
            Cell::new(self.col - 1, self.row),
            Cell::new(self.col, self.row + 1),
            Cell::new(self.col, self.row - 1),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SppInstance {
    pub grid_n: i32,
    pub start: Cell,
    pub end: Cell,
    #[serde(default)]
    pub obstacles: BTreeSet<Cell>,
    pub seed: u64,
}

impl SppInstance {
    pub fn in_grid(&self, c: Cell) -> bool {
        (0..self.grid_n).contains(&c.col) && (0..self.grid_n).contains(&c.row)
    }

    pub fn passable(&self, c: Cell) -> bool {
        self.in_grid(c) && !self.obstacles.contains(&c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SppSolution {
    pub optimal_length: i32,
    pub one_optimal_path: Vec<Cell>,
    pub optimal_path_count: u64,
}

/// Samples start and end uniformly among distinct cells; no obstacles.
pub fn gen_spp(seed: u64, grid_n: i32) -> SppInstance {
    assert!(grid_n >= 2, "grid_n must be at least 2");
    let mut rng = ChaCha8Rng::seed_from_u64(derive_stream(seed, "spp"));
    let cell = |rng: &mut ChaCha8Rng| Cell::new(rng.gen_range(0..grid_n), rng.gen_range(0..grid_n));
    let start = cell(&mut rng);
    let end = loop {
        let c = cell(&mut rng);
        if c != start {
            break c;
        }
    };
    SppInstance {
        grid_n,
        start,
        end,
        obstacles: BTreeSet::new(),
        seed,
    }
}

/// BFS from start; counts optimal paths over the distance DAG.
pub fn solve_spp(instance: &SppInstance) -> Result<SppSolution, CompositeError> {
    let n = instance.grid_n;
    let idx = |c: Cell| (c.row * n + c.col) as usize;
    let mut dist = vec![i32::MAX; (n * n) as usize];
    let mut count = vec![0u64; (n * n) as usize];
    let mut queue = VecDeque::new();
    dist[idx(instance.start)] = 0;
    count[idx(instance.start)] = 1;
    queue.push_back(instance.start);
    while let Some(c) = queue.pop_front() {
        for nb in c.neighbors() {
            if !instance.passable(nb) {
                continue;
            }
            let (ci, ni) = (idx(c), idx(nb));
            if dist[ni] == i32::MAX {
                dist[ni] = dist[ci] + 1;
                count[ni] = count[ci];
                queue.push_back(nb);
            } else if dist[ni] == dist[ci] + 1 {
                count[ni] += count[ci];
            }
        }
    }
    let optimal_length = dist[idx(instance.end)];
    if optimal_length == i32::MAX {
        return Err(CompositeError::Unreachable);
    }
    // walk back from end, always taking the smallest predecessor cell
    let mut path = vec![instance.end];
    let mut cur = instance.end;
    while cur != instance.start {
        let prev = cur
            .neighbors()
            .into_iter()
            .filter(|&nb| instance.passable(nb) && dist[idx(nb)] == dist[idx(cur)] - 1)
            .min()
            .expect("BFS predecessor must exist");
        path.push(prev);
        cur = prev;
    }
    path.reverse();
    Ok(SppSolution {
        optimal_length,
        one_optimal_path: path,
        optimal_path_count: count[idx(instance.end)],
    })
}

/// Validity of a submitted grid path, shared between the solver's self-check
/// and the evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathValidity {
    Valid,
    Empty,
    WrongStart,
    WrongEnd,
    IllegalStep,
    OffGridOrObstacle,
    RevisitedCell,
}

pub fn check_path(instance: &SppInstance, path: &[Cell]) -> PathValidity {
    if path.is_empty() {
        return PathValidity::Empty;
    }
    if path[0] != instance.start {
        return PathValidity::WrongStart;
    }
    if *path.last().unwrap() != instance.end {
        return PathValidity::WrongEnd;
    }
    let mut seen = BTreeSet::new();
    for (i, &c) in path.iter().enumerate() {
        if !instance.passable(c) {
            return PathValidity::OffGridOrObstacle;
        }
        if !seen.insert(c) {
            return PathValidity::RevisitedCell;
        }
        if i > 0 && path[i - 1].manhattan(c) != 1 {
            return PathValidity::IllegalStep;
        }
    }
    PathValidity::Valid
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TspInstance {
    pub objects: Vec<(char, Point)>,
    pub start_label: char,
    pub seed: u64,
}

impl TspInstance {
    pub fn labels(&self) -> Vec<char> {
        self.objects.iter().map(|&(l, _)| l).collect()
    }

    pub fn point_of(&self, label: char) -> Option<Point> {
        self.objects.iter().find(|&&(l, _)| l == label).map(|&(_, p)| p)
    }

    /// Closed-tour length of a visiting order (must be a full permutation).
    pub fn tour_length(&self, order: &[char]) -> f64 {
        let pts: Vec<Point> = order.iter().map(|&l| self.point_of(l).unwrap()).collect();
        let mut total = 0.0;
        for i in 0..pts.len() {
            total += euclidean_distance(pts[i], pts[(i + 1) % pts.len()]);
        }
        total
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TspSolution {
    pub order: Vec<char>,
    pub tour_length: f64,
}

/// Samples a labeled point set under the same separation rules as scenes;
/// the start object is drawn uniformly.
pub fn gen_tsp(seed: u64, n_objects: usize) -> Result<TspInstance, CompositeError> {
    assert!((3..=TSP_MAX_OBJECTS).contains(&n_objects));
    let cfg = GenConfig {
        n_objects: n_objects..=n_objects,
        ..GenConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(derive_stream(seed, "tsp"));
    for _ in 0..cfg.max_attempts {
        let points: Vec<Point> = (0..n_objects)
            .map(|_| {
                Point::new(
                    rng.gen_range(0..=crate::geometry::CANVAS_SIZE),
                    rng.gen_range(0..=crate::geometry::CANVAS_SIZE),
                )
            })
            .collect();
        if !points_admissible(&points, &cfg) {
            continue;
        }
        let objects: Vec<(char, Point)> = points
            .into_iter()
            .enumerate()
            .map(|(i, p)| ((b'A' + i as u8) as char, p))
            .collect();
        let start_label = objects[rng.gen_range(0..objects.len())].0;
        return Ok(TspInstance {
            objects,
            start_label,
            seed,
        });
    }
    Err(GenError::GenerationExhausted {
        index: seed,
        attempts: cfg.max_attempts,
    }
    .into())
}

/// Exact closed-tour TSP via Held-Karp. Among length-optimal tours, returns
/// the lexicographically smallest label sequence so strict-match scoring has
/// a single reference answer.
pub fn solve_tsp(instance: &TspInstance) -> Result<TspSolution, CompositeError> {
    let n = instance.objects.len();
    if n > TSP_MAX_OBJECTS {
        return Err(CompositeError::TooLarge(n));
    }
    // index objects with the start first, the rest in label order
    let mut others: Vec<usize> = (0..n)
        .filter(|&i| instance.objects[i].0 != instance.start_label)
        .collect();
    others.sort_by_key(|&i| instance.objects[i].0);
    let start = (0..n).find(|&i| instance.objects[i].0 == instance.start_label).unwrap();
    let m = others.len();
    let d = |a: usize, b: usize| euclidean_distance(instance.objects[a].1, instance.objects[b].1);

    // best[mask][j] = min cost of a path from others[j] through every
    // remaining object in `mask` and back to start
    let full = 1usize << m;
    let mut best = vec![vec![0.0f64; m]; full];
    for j in 0..m {
        best[0][j] = d(others[j], start);
    }
    for mask in 1..full {
        for j in 0..m {
            if mask & (1 << j) != 0 {
                continue;
            }
            let mut acc = f64::INFINITY;
            for v in 0..m {
                if mask & (1 << v) != 0 {
                    let c = d(others[j], others[v]) + best[mask & !(1 << v)][v];
                    if c < acc {
                        acc = c;
                    }
                }
            }
            best[mask][j] = acc;
        }
    }
    let all = full - 1;
    let mut opt = f64::INFINITY;
    for j in 0..m {
        let c = d(start, others[j]) + best[all & !(1 << j)][j];
        if c < opt {
            opt = c;
        }
    }
    if m == 0 {
        opt = 0.0;
    }

    // greedy forward reconstruction: smallest label whose completion still
    // attains the optimum (float ties resolved with a small tolerance)
    let tol = 1e-9 * (1.0 + opt.abs());
    let mut order = vec![instance.start_label];
    let mut mask = all;
    let mut last = start;
    let mut cost_so_far = 0.0;
    while mask != 0 {
        let mut chosen = None;
        for j in 0..m {
            if mask & (1 << j) == 0 {
                continue;
            }
            let c = cost_so_far + d(last, others[j]) + best[mask & !(1 << j)][j];
            if c <= opt + tol {
                chosen = Some(j);
                break; // others[] is label-sorted, first hit is smallest label
            }
        }
        let j = chosen.expect("optimal completion must exist");
        order.push(instance.objects[others[j]].0);
        cost_so_far += d(last, others[j]);
        last = others[j];
        mask &= !(1 << j);
    }
    Ok(TspSolution {
        tour_length: instance.tour_length(&order),
        order,
    })
}
