//! Brute-force placement probabilities for a four-team group, computed
//! without the engine.

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

pub fn p_beats(i: usize, j: usize, alpha: f64, beta: f64) -> f64 {
    let (ri, rj) = (i as f64 + 1.0, j as f64 + 1.0);
    1.0 / (1.0 + ((ri + beta) / (rj + beta)).powf(alpha))
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (k, &first) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(k);
        for mut tail in permutations(&rest) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

/// Every final order of the group with its probability.
fn group_orders(alpha: f64, beta: f64) -> Vec<([usize; 4], f64)> {
    let mut out = Vec::new();
    for mask in 0u32..64 {
        let mut points = [0u32; 4];
        let mut weight = 1.0;
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            let p = p_beats(i, j, alpha, beta);
            if mask & (1 << k) == 0 {
                points[i] += 2;
                weight *= p;
            } else {
                points[j] += 2;
                weight *= 1.0 - p;
            }
        }
        let mut levels: Vec<u32> = points.to_vec();
        levels.sort_unstable_by(|a, b| b.cmp(a));
        levels.dedup();
        // Each level is a block of tied teams; every block order is equally likely.
        let mut partial: Vec<(Vec<usize>, f64)> = vec![(Vec::new(), weight)];
        for level in levels {
            let block: Vec<usize> = (0..4).filter(|&t| points[t] == level).collect();
            let perms = permutations(&block);
            let share = 1.0 / perms.len() as f64;
            partial = partial
                .into_iter()
                .flat_map(|(prefix, w)| {
                    perms.iter().map(move |perm| {
                        let mut order = prefix.clone();
                        order.extend(perm);
                        (order, w * share)
                    })
                })
                .collect();
        }
        out.extend(partial.into_iter().map(|(o, w)| ([o[0], o[1], o[2], o[3]], w)));
    }
    out
}

/// `[team][place]` probabilities; with medal games, first plays second and
/// third plays fourth once more.
pub fn brute_force(alpha: f64, beta: f64, medal_games: bool) -> [[f64; 4]; 4] {
    let mut probs = [[0.0; 4]; 4];
    for (order, w) in group_orders(alpha, beta) {
        if !medal_games {
            for (place, &team) in order.iter().enumerate() {
                probs[team][place] += w;
            }
            continue;
        }
        let [a, b, c, d] = order;
        for final_home_wins in [true, false] {
            for bronze_home_wins in [true, false] {
                let pf = p_beats(a, b, alpha, beta);
                let pb = p_beats(c, d, alpha, beta);
                let wf = if final_home_wins { pf } else { 1.0 - pf };
                let wb = if bronze_home_wins { pb } else { 1.0 - pb };
                let (gold, silver) = if final_home_wins { (a, b) } else { (b, a) };
                let (bronze, fourth) = if bronze_home_wins { (c, d) } else { (d, c) };
                for (place, team) in [gold, silver, bronze, fourth].into_iter().enumerate() {
                    probs[team][place] += w * wf * wb;
                }
            }
        }
    }
    probs
}
