//! Branch-and-bound over maximal all-compatible rectangles.
//!
//! Rows carry a compatibility pattern over columns. A row set `P` with its
//! common columns `C` is closed when every row whose pattern contains `C`
//! is already in `P`; optimal rectangles for monotone objectives are closed,
//! and closed sets are enumerated once each by prefix-preserving extension.

use crate::famcore::BitSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Objective {
    /// Maximize `min(rows, cols)`.
    Square,
    /// Maximize `rows · cols`.
    Area,
    /// Stop at the first rectangle with at least these weights.
    Threshold { rows: u64, cols: u64 },
}

pub(crate) struct RectProblem {
    pub patterns: Vec<BitSet>,
    pub row_weights: Vec<u64>,
    pub col_weights: Vec<u64>,
}

#[derive(Clone, Debug)]
pub(crate) struct RectSolution {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub score: u128,
}

struct Search<'a> {
    p: &'a RectProblem,
    objective: Objective,
    best: Option<RectSolution>,
    floor: u128,
    nodes: u64,
    done: bool,
}

impl RectProblem {
    fn col_weight(&self, c: &BitSet) -> u64 {
        c.iter().map(|j| self.col_weights[j]).sum()
    }

    /// Best rectangle with score strictly above `floor`, if any.
    pub fn solve(&self, objective: Objective, floor: u128) -> Option<RectSolution> {
        let ncols = self.col_weights.len();
        let mut s = Search {
            p: self,
            objective,
            best: None,
            floor,
            nodes: 0,
            done: false,
        };
        let all = BitSet::full(ncols);
        let root = self.closure(&all);
        s.visit(&root, &all, None);
        s.best
    }

    fn closure(&self, c: &BitSet) -> BitSet {
        let mut q = BitSet::new(self.patterns.len());
        for (j, pat) in self.patterns.iter().enumerate() {
            if c.is_subset(pat) {
                q.insert(j);
            }
        }
        q
    }
}

impl Search<'_> {
    fn score(&self, wr: u64, wc: u64) -> u128 {
        match self.objective {
            Objective::Square => wr.min(wc) as u128,
            Objective::Area => wr as u128 * wc as u128,
            Objective::Threshold { .. } => 1,
        }
    }

    fn hopeless(&self, wr_max: u64, wc: u64) -> bool {
        match self.objective {
            Objective::Square | Objective::Area => self.score(wr_max, wc) <= self.floor,
            Objective::Threshold { rows, cols } => wr_max < rows || wc < cols,
        }
    }

    fn visit(&mut self, rows: &BitSet, cols: &BitSet, core: Option<usize>) {
        if self.done {
            return;
        }
        self.nodes += 1;
        let p = self.p;
        let wr: u64 = rows.iter().map(|i| p.row_weights[i]).sum();
        let wc = p.col_weight(cols);
        if wr > 0 && wc > 0 {
            let hit = match self.objective {
                Objective::Threshold { rows: r, cols: c } => wr >= r && wc >= c,
                _ => self.score(wr, wc) > self.floor,
            };
            if hit {
                let score = self.score(wr, wc);
                self.floor = score;
                self.best = Some(RectSolution {
                    rows: rows.iter().collect(),
                    cols: cols.iter().collect(),
                    score,
                });
                if matches!(self.objective, Objective::Threshold { .. }) {
                    self.done = true;
                    return;
                }
            }
        }
        let start = core.map_or(0, |c| c + 1);
        let candidates: Vec<usize> = (start..p.patterns.len())
            .filter(|&i| !rows.contains(i) && p.patterns[i].intersection_len(cols) > 0)
            .collect();
        let extra: u64 = candidates.iter().map(|&i| p.row_weights[i]).sum();
        if self.hopeless(wr + extra, wc) {
            return;
        }
        for &i in &candidates {
            let c2 = cols.intersection(&p.patterns[i]);
            let wc2 = p.col_weight(&c2);
            let rest: u64 = candidates
                .iter()
                .filter(|&&j| j >= i)
                .map(|&j| p.row_weights[j])
                .sum();
            if self.hopeless(wr + rest, wc2) {
                continue;
            }
            let q = p.closure(&c2);
            // prefix-preserving: closure may not add rows before i
            let prefix_ok = (0..i).all(|j| q.contains(j) == rows.contains(j));
            if prefix_ok {
                self.visit(&q, &c2, Some(i));
                if self.done {
                    return;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(rows: &[&[usize]], ncols: usize) -> RectProblem {
        RectProblem {
            patterns: rows
                .iter()
                .map(|r| BitSet::from_indices(ncols, r.iter().copied()).unwrap())
                .collect(),
            row_weights: vec![1; rows.len()],
            col_weights: vec![1; ncols],
        }
    }

    fn brute(p: &RectProblem, obj: Objective) -> u128 {
        let m = p.patterns.len();
        let mut best = 0;
        for mask in 1u64..1 << m {
            let mut c = BitSet::full(p.col_weights.len());
            let mut wr = 0;
            for i in 0..m {
                if mask >> i & 1 == 1 {
                    c.intersect_with(&p.patterns[i]);
                    wr += p.row_weights[i];
                }
            }
            let wc = p.col_weight(&c);
            let s = match obj {
                Objective::Square => wr.min(wc) as u128,
                _ => wr as u128 * wc as u128,
            };
            best = best.max(s);
        }
        best
    }

    #[test]
    fn matches_brute_force() {
        let mut seed = 12345u64;
        for _ in 0..200 {
            let mut rows = Vec::new();
            for _ in 0..7 {
                let mut r = Vec::new();
                for j in 0..6 {
                    seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    if seed >> 62 != 0 {
                        r.push(j);
                    }
                }
                rows.push(r);
            }
            let refs: Vec<&[usize]> = rows.iter().map(|r| r.as_slice()).collect();
            let p = problem(&refs, 6);
            for obj in [Objective::Square, Objective::Area] {
                let got = p.solve(obj, 0).map_or(0, |s| s.score);
                assert_eq!(got, brute(&p, obj));
            }
        }
    }

    #[test]
    fn threshold_stops_early() {
        let p = problem(&[&[0, 1], &[0, 1], &[2]], 3);
        let s = p.solve(Objective::Threshold { rows: 2, cols: 2 }, 0).unwrap();
        assert_eq!(s.rows, vec![0, 1]);
        assert!(p.solve(Objective::Threshold { rows: 3, cols: 1 }, 0).is_none());
    }
}
