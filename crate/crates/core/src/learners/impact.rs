//! Impact Analysis: rank candidate items by how many new four-node paths
//! (user - candidate - other user - other item) a rating for the candidate
//! would open in the rating graph. More paths mean more new user
//! similarities a neighborhood recommender could exploit.

use crate::data::RatingMatrix;

/// Count the four-node paths `user - candidate - v - j` a rating
/// (user, candidate) would create: v is any other user who rated the
/// candidate, and j any item v rated that the user has not rated (and is not
/// the candidate). Each (v, j) pair counts once.
pub fn impact_score(training: &RatingMatrix, user: u32, candidate: u32) -> usize {
    let mut rated = vec![false; training.n_items()];
    for &(i, _) in training.user_ratings(user) {
        rated[i as usize] = true;
    }
    score_with_rated(training, user, candidate, &rated)
}

fn score_with_rated(training: &RatingMatrix, user: u32, candidate: u32, rated: &[bool]) -> usize {
    let mut paths = 0usize;
    for v in 0..training.n_users() as u32 {
        if v == user {
            continue;
        }
        if training.rating(v, candidate).is_none() {
            continue;
        }
        for &(j, _) in training.user_ratings(v) {
            if j != candidate && !rated[j as usize] {
                paths += 1;
            }
        }
    }
    paths
}

/// All items the user has not rated, sorted by impact score descending;
/// ties break by ascending item index.
pub fn rank_impact_analysis(training: &RatingMatrix, user: u32) -> Vec<u32> {
    let mut rated = vec![false; training.n_items()];
    for &(i, _) in training.user_ratings(user) {
        rated[i as usize] = true;
    }
    // per-candidate rater lists via one pass over the matrix
    let cols = training.columns();
    let mut scored: Vec<(u32, usize)> = Vec::new();
    for item in 0..training.n_items() as u32 {
        if rated[item as usize] {
            continue;
        }
        let mut paths = 0usize;
        for &(v, _) in &cols[item as usize] {
            if v == user {
                continue;
            }
            for &(j, _) in training.user_ratings(v) {
                if j != item && !rated[j as usize] {
                    paths += 1;
                }
            }
        }
        scored.push((item, paths));
    }
    scored.sort_by(|(ia, sa), (ib, sb)| sb.cmp(sa).then(ia.cmp(ib)));
    scored.into_iter().map(|(item, _)| item).collect()
}
