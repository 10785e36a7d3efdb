use std::collections::VecDeque;

use super::dfa::Dfa;

/// Hopcroft partition refinement on the reachable part of `d`.
///
/// The result is renumbered breadth-first from the initial state, so
/// automata for the same language over the same minterms come out
/// identical.
pub fn minimize(d: &Dfa) -> Dfa {
    let n = d.num_states();
    let k = d.num_symbols();

    let mut reachable = vec![false; n];
    let mut order = vec![d.initial];
    reachable[d.initial] = true;
    let mut i = 0;
    while i < order.len() {
        let q = order[i];
        for s in 0..k {
            let t = d.step(q, s);
            if !reachable[t] {
                reachable[t] = true;
                order.push(t);
            }
        }
        i += 1;
    }

    // pre[s][q]: reachable states that move to q on symbol s.
    let mut pre = vec![vec![Vec::new(); n]; k];
    for &q in &order {
        for (s, row) in pre.iter_mut().enumerate() {
            row[d.step(q, s)].push(q);
        }
    }

    let mut block_of = vec![usize::MAX; n];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let (acc, rej): (Vec<usize>, Vec<usize>) = order.iter().partition(|&&q| d.is_accepting(q));
    for part in [acc, rej] {
        if !part.is_empty() {
            for &q in &part {
                block_of[q] = blocks.len();
            }
            blocks.push(part);
        }
    }

    let mut work: VecDeque<usize> = (0..blocks.len()).collect();
    let mut hits = vec![0usize; n];
    let mut in_pre = vec![false; n];
    while let Some(splitter) = work.pop_front() {
        let members = blocks[splitter].clone();
        for row in &pre {
            let mut touched: Vec<usize> = Vec::new();
            let mut marked: Vec<usize> = Vec::new();
            for &q in &members {
                for &p in &row[q] {
                    let b = block_of[p];
                    if hits[b] == 0 {
                        touched.push(b);
                    }
                    hits[b] += 1;
                    in_pre[p] = true;
                    marked.push(p);
                }
            }
            for &b in &touched {
                let count = hits[b];
                hits[b] = 0;
                if count == blocks[b].len() {
                    continue;
                }
                let mut inside = Vec::new();
                let mut outside = Vec::new();
                for &p in &blocks[b] {
                    if in_pre[p] {
                        inside.push(p);
                    } else {
                        outside.push(p);
                    }
                }
                // Keep the larger half in place and enqueue the smaller.
                let (stay, moved) = if inside.len() <= outside.len() {
                    (outside, inside)
                } else {
                    (inside, outside)
                };
                let new_id = blocks.len();
                for &p in &moved {
                    block_of[p] = new_id;
                }
                blocks[b] = stay;
                blocks.push(moved);
                work.push_back(new_id);
            }
            for &p in &marked {
                in_pre[p] = false;
            }
        }
    }

    // Renumber blocks breadth-first from the initial state.
    let mut new_id = vec![usize::MAX; blocks.len()];
    let mut reps: Vec<usize> = Vec::new();
    let mut queue = VecDeque::from([d.initial]);
    new_id[block_of[d.initial]] = 0;
    reps.push(d.initial);
    while let Some(q) = queue.pop_front() {
        for s in 0..k {
            let t = d.step(q, s);
            let b = block_of[t];
            if new_id[b] == usize::MAX {
                new_id[b] = reps.len();
                reps.push(t);
                queue.push_back(t);
            }
        }
    }
    let delta = reps
        .iter()
        .map(|&q| (0..k).map(|s| new_id[block_of[d.step(q, s)]]).collect())
        .collect();
    Dfa {
        symbols: d.symbols.clone(),
        minterms: d.minterms.clone(),
        labels: reps.iter().map(|&q| d.labels[q].clone()).collect(),
        initial: 0,
        delta,
        accepting: reps.iter().map(|&q| d.accepting[q]).collect(),
    }
}
