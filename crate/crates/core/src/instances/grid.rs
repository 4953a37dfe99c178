use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::instance::Matrix;
use crate::rng::RngSeed;

/// `(row, col)` position on a grid map.
pub type Cell = (usize, usize);

const MAX_MAP_ATTEMPTS: usize = 1000;

/// Occupancy grid; `true` cells are obstacles. Movement is 4-connected with
/// unit step cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMap {
    width: usize,
    height: usize,
    occupancy: Vec<bool>,
}

impl GridMap {
    /// `occupancy` is row-major, `height` rows of `width` cells.
    pub fn new(width: usize, height: usize, occupancy: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return invalid(format!("map dimensions {width}x{height} must be positive"));
        }
        if occupancy.len() != width * height {
            return invalid(format!("occupancy has {} cells, expected {}", occupancy.len(), width * height));
        }
        if occupancy.iter().all(|&o| o) {
            return invalid("map has no free cell");
        }
        Ok(Self { width, height, occupancy })
    }

    pub fn from_obstacles(width: usize, height: usize, obstacles: &[Cell]) -> Result<Self> {
        let mut occupancy = vec![false; width * height];
        for &(r, c) in obstacles {
            if r >= height || c >= width {
                return invalid(format!("obstacle ({r}, {c}) outside {width}x{height} map"));
            }
            occupancy[r * width + c] = true;
        }
        Self::new(width, height, occupancy)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn is_free(&self, (r, c): Cell) -> bool {
        r < self.height && c < self.width && !self.occupancy[r * self.width + c]
    }

    pub fn obstacles(&self) -> Vec<Cell> {
        self.cells().filter(|&cell| !self.is_free(cell)).collect()
    }

    pub fn free_cells(&self) -> Vec<Cell> {
        self.cells().filter(|&cell| self.is_free(cell)).collect()
    }

    fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.height).flat_map(move |r| (0..self.width).map(move |c| (r, c)))
    }

    fn index(&self, (r, c): Cell) -> usize {
        r * self.width + c
    }

    fn cell(&self, idx: usize) -> Cell {
        (idx / self.width, idx % self.width)
    }

    /// Free 4-neighbours of `cell`.
    pub fn neighbours(&self, (r, c): Cell) -> impl Iterator<Item = Cell> + '_ {
        let up = r.checked_sub(1).map(|r| (r, c));
        let left = c.checked_sub(1).map(|c| (r, c));
        [up, Some((r + 1, c)), left, Some((r, c + 1))]
            .into_iter()
            .flatten()
            .filter(move |&n| self.is_free(n))
    }

    /// Whether the free cells form one 4-connected component.
    pub fn is_connected(&self) -> bool {
        let free = self.free_cells();
        let Some(&start) = free.first() else { return false };
        let mut seen = vec![false; self.occupancy.len()];
        seen[self.index(start)] = true;
        let mut queue = VecDeque::from([start]);
        let mut reached = 1;
        while let Some(cell) = queue.pop_front() {
            for n in self.neighbours(cell) {
                let i = self.index(n);
                if !seen[i] {
                    seen[i] = true;
                    reached += 1;
                    queue.push_back(n);
                }
            }
        }
        reached == free.len()
    }

    /// Shortest 4-connected path length between free cells, by A* with the
    /// Manhattan heuristic. `None` when unreachable.
    pub fn astar(&self, from: Cell, to: Cell) -> Option<u32> {
        let manhattan = |(r, c): Cell| (r.abs_diff(to.0) + c.abs_diff(to.1)) as u32;
        let goal = self.index(to);
        let mut best = vec![u32::MAX; self.occupancy.len()];
        let mut open = BinaryHeap::new();
        best[self.index(from)] = 0;
        // Ties on f go to the deeper node.
        open.push(Reverse((manhattan(from), Reverse(0u32), self.index(from))));
        while let Some(Reverse((_, Reverse(g), idx))) = open.pop() {
            if idx == goal {
                return Some(g);
            }
            if g > best[idx] {
                continue;
            }
            for n in self.neighbours(self.cell(idx)) {
                let ni = self.index(n);
                let ng = g + 1;
                if ng < best[ni] {
                    best[ni] = ng;
                    open.push(Reverse((ng + manhattan(n), Reverse(ng), ni)));
                }
            }
        }
        None
    }
}

/// Random map where each cell is an obstacle with probability
/// `obstacle_density`, redrawn until the free space is one 4-connected
/// component.
pub fn gen_gridmap(width: usize, height: usize, obstacle_density: f64, seed: RngSeed) -> Result<GridMap> {
    if width < 5 || height < 5 {
        return invalid(format!("map must be at least 5x5, got {width}x{height}"));
    }
    if !(0.0..1.0).contains(&obstacle_density) {
        return invalid(format!("obstacle density {obstacle_density} outside [0, 1)"));
    }
    let mut rng = seed.rng();
    for _ in 0..MAX_MAP_ATTEMPTS {
        let occupancy: Vec<bool> = (0..width * height).map(|_| rng.gen_bool(obstacle_density)).collect();
        if let Ok(map) = GridMap::new(width, height, occupancy) {
            if map.is_connected() {
                return Ok(map);
            }
        }
    }
    Err(Error::Infeasible(format!(
        "no connected {width}x{height} map at density {obstacle_density} in {MAX_MAP_ATTEMPTS} attempts"
    )))
}

/// `n` distinct free cells drawn uniformly without replacement.
pub fn sample_poi(map: &GridMap, n: usize, seed: RngSeed) -> Result<Vec<Cell>> {
    let free = map.free_cells();
    if n > free.len() {
        return Err(Error::Infeasible(format!("{n} points requested, map has {} free cells", free.len())));
    }
    let mut rng = seed.rng();
    Ok(rand::seq::index::sample(&mut rng, free.len(), n).into_iter().map(|i| free[i]).collect())
}

/// All-pairs shortest path lengths between `points` via A*.
pub fn apsp_astar(map: &GridMap, points: &[Cell]) -> Result<Matrix> {
    if let Some(p) = points.iter().find(|&&p| !map.is_free(p)) {
        return invalid(format!("point {p:?} is not a free cell"));
    }
    let n = points.len();
    let row = |i: usize| -> Result<Vec<f64>> {
        ((i + 1)..n)
            .map(|j| {
                map.astar(points[i], points[j]).map(f64::from).ok_or_else(|| {
                    Error::Infeasible(format!("points {:?} and {:?} are not connected", points[i], points[j]))
                })
            })
            .collect()
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(row).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Vec<f64>> = (0..n).map(row).collect::<Result<_>>()?;

    let mut m = Matrix::zeros(n);
    for (i, r) in rows.iter().enumerate() {
        for (k, &d) in r.iter().enumerate() {
            m.set(i, i + 1 + k, d);
            m.set(i + 1 + k, i, d);
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    /// Plain Dijkstra over the free cells, independent of the A* path.
    fn dijkstra(map: &GridMap, from: Cell) -> Vec<Option<u32>> {
        let idx = |(r, c): Cell| r * map.width() + c;
        let mut dist = vec![None; map.width() * map.height()];
        let mut heap = BinaryHeap::new();
        dist[idx(from)] = Some(0u32);
        heap.push(Reverse((0u32, from)));
        while let Some(Reverse((d, cell))) = heap.pop() {
            if dist[idx(cell)].is_some_and(|best| d > best) {
                continue;
            }
            let (r, c) = cell;
            let cand = [(r.wrapping_sub(1), c), (r + 1, c), (r, c.wrapping_sub(1)), (r, c + 1)];
            for n in cand {
                if map.is_free(n) && dist[idx(n)].is_none_or(|best| d + 1 < best) {
                    dist[idx(n)] = Some(d + 1);
                    heap.push(Reverse((d + 1, n)));
                }
            }
        }
        dist
    }

    #[test]
    fn empty_map_manhattan() {
        let map = GridMap::from_obstacles(5, 5, &[]).unwrap();
        let m = apsp_astar(&map, &[(0, 0), (0, 4), (4, 4)]).unwrap();
        assert_eq!(m.get(0, 1), 4.0);
        assert_eq!(m.get(0, 2), 8.0);
        assert_eq!(m.get(1, 1), 0.0);
        assert_eq!(map.astar((2, 2), (2, 2)), Some(0));
    }

    #[test]
    fn wall_with_gap_matches_dijkstra() {
        // Column 5 is a wall except at row 8.
        let wall: Vec<Cell> = (0..10).filter(|&r| r != 8).map(|r| (r, 5)).collect();
        let map = GridMap::from_obstacles(10, 10, &wall).unwrap();
        assert!(map.is_connected());
        let pts = map.free_cells();
        let m = apsp_astar(&map, &pts).unwrap();
        for (i, &p) in pts.iter().enumerate() {
            let d = dijkstra(&map, p);
            for (j, &q) in pts.iter().enumerate() {
                assert_eq!(m.get(i, j), d[q.0 * 10 + q.1].unwrap() as f64);
            }
        }
        // Crossing the wall detours through the gap.
        assert_eq!(map.astar((0, 4), (0, 6)), Some(2 + 8 + 8));
    }

    #[test]
    fn unreachable_points_are_infeasible() {
        let wall: Vec<Cell> = (0..5).map(|r| (r, 2)).collect();
        let map = GridMap::from_obstacles(5, 5, &wall).unwrap();
        assert!(!map.is_connected());
        assert!(matches!(apsp_astar(&map, &[(0, 0), (0, 4)]), Err(Error::Infeasible(_))));
        assert!(matches!(apsp_astar(&map, &[(0, 2)]), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn generated_maps() {
        let empty = gen_gridmap(8, 6, 0.0, RngSeed(1)).unwrap();
        assert!(empty.obstacles().is_empty());
        let a = gen_gridmap(20, 20, 0.2, RngSeed(5)).unwrap();
        assert_eq!(a, gen_gridmap(20, 20, 0.2, RngSeed(5)).unwrap());
        assert!(a.is_connected());
        assert!(!a.obstacles().is_empty());
        assert!(gen_gridmap(4, 10, 0.1, RngSeed(0)).is_err());
        assert!(gen_gridmap(10, 10, 1.0, RngSeed(0)).is_err());
        assert!(matches!(gen_gridmap(30, 30, 0.9, RngSeed(0)), Err(Error::Infeasible(_))));
    }

    #[test]
    fn generated_map_paths_satisfy_triangle_inequality() {
        let map = gen_gridmap(15, 15, 0.25, RngSeed(12)).unwrap();
        let pts = sample_poi(&map, 12, RngSeed(13)).unwrap();
        let m = apsp_astar(&map, &pts).unwrap();
        m.check_adjacency("A1").unwrap();
        for i in 0..12 {
            let d = dijkstra(&map, pts[i]);
            for j in 0..12 {
                assert_eq!(m.get(i, j), d[pts[j].0 * 15 + pts[j].1].unwrap() as f64);
                for k in 0..12 {
                    assert!(m.get(i, k) <= m.get(i, j) + m.get(j, k));
                }
            }
        }
    }

    #[test]
    fn poi_sampling() {
        let map = gen_gridmap(6, 5, 0.2, RngSeed(2)).unwrap();
        let free = map.free_cells();
        let all = sample_poi(&map, free.len(), RngSeed(3)).unwrap();
        let set: HashSet<_> = all.iter().cloned().collect();
        assert_eq!(set, free.iter().cloned().collect());
        let some = sample_poi(&map, 5, RngSeed(4)).unwrap();
        assert_eq!(some.iter().collect::<HashSet<_>>().len(), 5);
        assert!(some.iter().all(|&c| map.is_free(c)));
        assert!(sample_poi(&map, free.len() + 1, RngSeed(3)).is_err());
    }

    #[test]
    fn poi_frequencies_are_uniform() {
        let map = GridMap::from_obstacles(5, 5, &[(0, 0), (2, 2), (4, 1)]).unwrap();
        let free = map.free_cells();
        let (draws, per) = (10_000u64, 3);
        let mut counts = vec![0u64; 25];
        for s in 0..draws {
            for (r, c) in sample_poi(&map, per, RngSeed(s)).unwrap() {
                counts[r * 5 + c] += 1;
            }
        }
        let expected = (draws as usize * per) as f64 / free.len() as f64;
        let chi2: f64 = free
            .iter()
            .map(|&(r, c)| (counts[r * 5 + c] as f64 - expected).powi(2) / expected)
            .sum();
        // 21 degrees of freedom; the 0.999 quantile is about 46.8.
        assert!(chi2 < 46.8, "chi2 = {chi2}");
    }
}
