use rand::seq::SliceRandom;

use crate::instance::TspInstance;
use crate::rng::Rng;

pub fn random_tour(t: &TspInstance, rng: &mut Rng) -> Vec<usize> {
    let mut tour: Vec<usize> = (0..t.n).collect();
    tour.shuffle(rng);
    tour
}

pub fn nearest_neighbor(d: &[Vec<f64>], start: usize) -> Vec<usize> {
    let n = d.len();
    let mut visited = vec![false; n];
    let mut tour = vec![start];
    visited[start] = true;
    let mut cur = start;
    for _ in 1..n {
        let next = (0..n)
            .filter(|&j| !visited[j])
            .min_by(|&a, &b| d[cur][a].total_cmp(&d[cur][b]).then(a.cmp(&b)))
            .unwrap();
        visited[next] = true;
        tour.push(next);
        cur = next;
    }
    tour
}

/// Insertion construction. `farthest` picks the city farthest from the tour,
/// otherwise the nearest; each is inserted at its cheapest position.
pub fn insertion(d: &[Vec<f64>], farthest: bool) -> Vec<usize> {
    let n = d.len();
    if n <= 2 {
        return (0..n).collect();
    }
    // Seed with city 0 and its nearest (or farthest) partner.
    let pick_from_0 = (1..n)
        .min_by(|&a, &b| {
            let o = d[0][a].total_cmp(&d[0][b]);
            if farthest { o.reverse() } else { o }.then(a.cmp(&b))
        })
        .unwrap();
    let mut tour = vec![0, pick_from_0];
    let mut in_tour = vec![false; n];
    in_tour[0] = true;
    in_tour[pick_from_0] = true;
    // gap[v] = distance from v to the nearest tour city
    let mut gap: Vec<f64> = (0..n).map(|v| d[0][v].min(d[pick_from_0][v])).collect();
    for _ in 2..n {
        let c = (0..n)
            .filter(|&v| !in_tour[v])
            .min_by(|&a, &b| {
                let o = gap[a].total_cmp(&gap[b]);
                if farthest { o.reverse() } else { o }.then(a.cmp(&b))
            })
            .unwrap();
        let m = tour.len();
        let pos = (0..m)
            .min_by(|&i, &j| {
                let cost = |k: usize| {
                    let (a, b) = (tour[k], tour[(k + 1) % m]);
                    d[a][c] + d[c][b] - d[a][b]
                };
                cost(i).total_cmp(&cost(j)).then(i.cmp(&j))
            })
            .unwrap();
        tour.insert(pos + 1, c);
        in_tour[c] = true;
        for v in 0..n {
            gap[v] = gap[v].min(d[c][v]);
        }
    }
    tour
}

/// First-improvement 2-opt until a full pass finds nothing or `max_passes`
/// is reached. Returns the number of passes that improved the tour.
pub fn two_opt(d: &[Vec<f64>], tour: &mut [usize], max_passes: usize) -> u64 {
    let n = tour.len();
    if n < 4 {
        return 0;
    }
    let mut passes = 0;
    for _ in 0..max_passes {
        let mut improved = false;
        for i in 0..n - 1 {
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (a, b) = (tour[i], tour[i + 1]);
                let (c, e) = (tour[j], tour[(j + 1) % n]);
                let delta = d[a][c] + d[b][e] - d[a][b] - d[c][e];
                if delta < -1e-10 {
                    tour[i + 1..=j].reverse();
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
        passes += 1;
    }
    passes
}

/// Runs 2-opt from `starts` random tours and keeps the shortest.
pub fn multi_start_two_opt(
    t: &TspInstance,
    d: &[Vec<f64>],
    starts: usize,
    max_passes: usize,
    rng: &mut Rng,
) -> (Vec<usize>, u64) {
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut passes = 0;
    for _ in 0..starts.max(1) {
        let mut tour = random_tour(t, rng);
        passes += two_opt(d, &mut tour, max_passes);
        let len = t.tour_length(&tour);
        if best.as_ref().is_none_or(|(b, _)| len < *b) {
            best = Some((len, tour));
        }
    }
    (best.unwrap().1, passes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> TspInstance {
        TspInstance::new(vec![(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)]).unwrap()
    }

    #[test]
    fn two_opt_uncrosses() {
        let t = square();
        let d = t.distance_matrix();
        let mut tour = vec![0, 1, 2, 3];
        assert!(t.tour_length(&tour) > 4.0);
        two_opt(&d, &mut tour, 100);
        assert!((t.tour_length(&tour) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn constructions_are_permutations() {
        let t = square();
        let d = t.distance_matrix();
        for tour in [nearest_neighbor(&d, 0), insertion(&d, true), insertion(&d, false)] {
            let mut s = tour.clone();
            s.sort_unstable();
            assert_eq!(s, vec![0, 1, 2, 3]);
            assert!((t.tour_length(&tour) - 4.0).abs() < 1e-12);
        }
    }
}
