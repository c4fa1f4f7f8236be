//! Independent brute-force oracles for validating the fast paths. These share
//! no logic with the production solvers: TSP by permutation enumeration, SPP
//! by exhaustive DFS, sector frequencies by Monte Carlo.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::composite::{Cell, SppInstance, TspInstance};
use crate::geometry::{DirectionLabel, Point, SectorConfig};

/// Exact minimum closed-tour length over all `(n-1)!` permutations.
/// Exponential; intended for `n <= 9`.
pub fn brute_tsp(instance: &TspInstance) -> f64 {
    let pts: Vec<Point> = instance.objects.iter().map(|&(_, p)| p).collect();
    let start = instance
        .objects
        .iter()
        .position(|&(l, _)| l == instance.start_label)
        .expect("start label present");
    let dist = |a: usize, b: usize| crate::geometry::euclidean_distance(pts[a], pts[b]);
    let mut rest: Vec<usize> = (0..pts.len()).filter(|&i| i != start).collect();
    let mut best = f64::INFINITY;
    permute(&mut rest, 0, &mut |perm| {
        let mut len = dist(start, perm[0]);
        for w in perm.windows(2) {
            len += dist(w[0], w[1]);
        }
        len += dist(*perm.last().unwrap(), start);
        if len < best {
            best = len;
        }
    });
    best
}

fn permute(items: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// The complete set of optimal paths, found by DFS bounded by the optimal
/// length (which is itself established by iterative deepening, not BFS).
pub fn enumerate_shortest_paths(instance: &SppInstance) -> Vec<Vec<Cell>> {
    // find the optimal length by deepening, independent of the BFS solver
    let max_depth = (instance.grid_n * instance.grid_n) as usize;
    for depth in 0..=max_depth {
        let mut found = Vec::new();
        let mut path = vec![instance.start];
        dfs(instance, depth, &mut path, &mut found);
        if !found.is_empty() {
            return found;
        }
    }
    Vec::new()
}

fn dfs(instance: &SppInstance, depth: usize, path: &mut Vec<Cell>, found: &mut Vec<Vec<Cell>>) {
    let cur = *path.last().unwrap();
    if path.len() == depth + 1 {
        if cur == instance.end {
            found.push(path.clone());
        }
        return;
    }
    for nb in cur.neighbors() {
        if instance.passable(nb) && !path.contains(&nb) {
            path.push(nb);
            dfs(instance, depth, path, found);
            path.pop();
        }
    }
}

/// Empirical 8-way label frequencies for uniformly sampled point pairs
/// (rejecting coincident points). Fractions sum to 1.
pub fn monte_carlo_sector_freq(
    cfg: &SectorConfig,
    samples: u64,
    seed: u64,
) -> Vec<(DirectionLabel, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = std::collections::BTreeMap::new();
    let mut done = 0u64;
    while done < samples {
        let a = Point::new(rng.gen_range(0..=1000), rng.gen_range(0..=1000));
        let b = Point::new(rng.gen_range(0..=1000), rng.gen_range(0..=1000));
        if a == b {
            continue;
        }
        // classify by angle directly; no shared code with direction_sector
        let angle = ((b.y - a.y) as f64)
            .atan2((b.x - a.x) as f64)
            .to_degrees()
            .rem_euclid(360.0);
        let hw = cfg.cardinal_half_width;
        let label = if angle <= hw || angle >= 360.0 - hw {
            DirectionLabel::Right
        } else if (angle - 90.0).abs() <= hw {
            DirectionLabel::Top
        } else if (angle - 180.0).abs() <= hw {
            DirectionLabel::Left
        } else if (angle - 270.0).abs() <= hw {
            DirectionLabel::Bottom
        } else if angle < 90.0 {
            DirectionLabel::TopRight
        } else if angle < 180.0 {
            DirectionLabel::TopLeft
        } else if angle < 270.0 {
            DirectionLabel::BottomLeft
        } else {
            DirectionLabel::BottomRight
        };
        *counts.entry(label).or_insert(0u64) += 1;
        done += 1;
    }
    DirectionLabel::ALL
        .iter()
        .map(|&l| (l, *counts.get(&l).unwrap_or(&0) as f64 / samples as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn brute_tsp_hand_computed_square() {
        // 4 corners of a 500-unit square: optimal closed tour is the perimeter
        let inst = TspInstance {
            objects: vec![
                ('A', Point::new(0, 0)),
                ('B', Point::new(0, 500)),
                ('C', Point::new(500, 500)),
                ('D', Point::new(500, 0)),
            ],
            start_label: 'A',
            seed: 0,
        };
        assert!((brute_tsp(&inst) - 2000.0).abs() < 1e-9);
    }

    #[test]
    fn enumerate_corner_to_corner_counts() {
        let inst = SppInstance {
            grid_n: 4,
            start: Cell::new(0, 0),
            end: Cell::new(3, 3),
            obstacles: BTreeSet::new(),
            seed: 0,
        };
        let paths = enumerate_shortest_paths(&inst);
        assert_eq!(paths.len(), 20); // C(6,3)
        for p in &paths {
            assert_eq!(p.len(), 7);
        }
    }

    #[test]
    fn enumerate_adjacent_cells() {
        let inst = SppInstance {
            grid_n: 4,
            start: Cell::new(1, 1),
            end: Cell::new(2, 1),
            obstacles: BTreeSet::new(),
            seed: 0,
        };
        assert_eq!(enumerate_shortest_paths(&inst).len(), 1);
    }

    #[test]
    fn sector_freq_limits() {
        // equal 45-degree sectors: every label ~12.5%
        let cfg = SectorConfig { cardinal_half_width: 22.5, epsilon_exclusion: 0.0 };
        for (_, f) in monte_carlo_sector_freq(&cfg, 200_000, 1) {
            assert!((f - 0.125).abs() < 0.01);
        }
        // vanishing half-width: cardinal labels vanish
        let cfg = SectorConfig { cardinal_half_width: 1e-6, epsilon_exclusion: 0.0 };
        for (l, f) in monte_carlo_sector_freq(&cfg, 100_000, 2) {
            if !l.is_diagonal() {
                assert!(f < 0.001, "{l:?} = {f}");
            }
        }
    }
}
