//! Decision-tree interview: each node asks one item and routes the user
//! along a like / dislike / unknown edge depending on whether the answer is
//! at or above the dataset mean, below it, or missing.
//!
//! The tree is built greedily top-down. A node's splitter is the item whose
//! like/dislike/unknown partition of the node's users minimizes the total
//! squared deviation between each partition's per-item mean ratings and the
//! ratings actually held by the partition's users. Children are only
//! expanded while they strictly reduce that error, the partition has at
//! least two users, and the depth budget allows another question.

use crate::data::{global_mean, DataError, RatingMatrix};

use super::{AskOutcome, Response};

#[derive(Debug, Clone)]
pub struct DecisionTree {
    /// Like/dislike threshold: the dataset mean, frozen at build time.
    pub threshold: f64,
    pub root: Option<Box<TreeNode>>,
}

#[derive(Debug, Clone)]
pub struct TreeNode {
    /// Item asked at this node.
    pub item: u32,
    /// Users represented by this node.
    pub users: Vec<u32>,
    /// Squared-error score of the chosen split over this node's users.
    pub error: f64,
    pub like: Option<Box<TreeNode>>,
    pub dislike: Option<Box<TreeNode>>,
    pub unknown: Option<Box<TreeNode>>,
}

impl TreeNode {
    /// Mean rating of `item` over this node's users, falling back to the
    /// provided parent prediction and then the global mean when no user in
    /// the node rated the item.
    pub fn predict(
        &self,
        matrix: &RatingMatrix,
        item: u32,
        parent: Option<f64>,
        global: f64,
    ) -> f64 {
        let mut sum = 0.0;
        let mut count = 0usize;
        for &u in &self.users {
            if let Some(r) = matrix.rating(u, item) {
                sum += r;
                count += 1;
            }
        }
        if count > 0 {
            sum / count as f64
        } else {
            parent.unwrap_or(global)
        }
    }

    pub fn depth(&self) -> usize {
        let child = |n: &Option<Box<TreeNode>>| n.as_ref().map(|c| c.depth()).unwrap_or(0);
        1 + child(&self.like)
            .max(child(&self.dislike))
            .max(child(&self.unknown))
    }
}

/// Scratch accumulators reused across candidate evaluations.
struct SplitScratch {
    sum: Vec<f64>,
    count: Vec<u32>,
    touched: Vec<u32>,
}

impl SplitScratch {
    fn new(n_items: usize) -> Self {
        SplitScratch {
            sum: vec![0.0; n_items],
            count: vec![0; n_items],
            touched: Vec::new(),
        }
    }

    /// Sum of squared deviations from per-item partition means, over all
    /// ratings held by `users`: sum(r^2) - sum_j(sum_j^2 / count_j).
    fn partition_error(&mut self, matrix: &RatingMatrix, users: &[u32]) -> f64 {
        let mut sq = 0.0;
        for &u in users {
            for &(i, r) in matrix.user_ratings(u) {
                let idx = i as usize;
                if self.count[idx] == 0 {
                    self.touched.push(i);
                }
                self.sum[idx] += r;
                self.count[idx] += 1;
                sq += r * r;
            }
        }
        let mut explained = 0.0;
        for &i in &self.touched {
            let idx = i as usize;
            explained += self.sum[idx] * self.sum[idx] / self.count[idx] as f64;
            self.sum[idx] = 0.0;
            self.count[idx] = 0;
        }
        self.touched.clear();
        sq - explained
    }
}

fn partition_users(
    matrix: &RatingMatrix,
    users: &[u32],
    item: u32,
    threshold: f64,
) -> (Vec<u32>, Vec<u32>, Vec<u32>) {
    let mut like = Vec::new();
    let mut dislike = Vec::new();
    let mut unknown = Vec::new();
    for &u in users {
        match matrix.rating(u, item) {
            // ties at the threshold go to "like"
            Some(r) if r >= threshold => like.push(u),
            Some(_) => dislike.push(u),
            None => unknown.push(u),
        }
    }
    (like, dislike, unknown)
}

/// Greedy top-down construction over all users of the training matrix.
/// `depth_budget` bounds the number of questions on any root-to-leaf path.
pub fn build_decision_tree(
    training: &RatingMatrix,
    depth_budget: usize,
) -> Result<DecisionTree, DataError> {
    let threshold = global_mean(training)?;
    if depth_budget == 0 {
        return Ok(DecisionTree {
            threshold,
            root: None,
        });
    }
    let all_users: Vec<u32> = (0..training.n_users() as u32).collect();
    let mut scratch = SplitScratch::new(training.n_items());
    let root = build_node(training, all_users, threshold, 1, depth_budget, &mut scratch, true);
    Ok(DecisionTree { threshold, root })
}

fn build_node(
    matrix: &RatingMatrix,
    users: Vec<u32>,
    threshold: f64,
    depth: usize,
    budget: usize,
    scratch: &mut SplitScratch,
    is_root: bool,
) -> Option<Box<TreeNode>> {
    if users.is_empty() {
        return None;
    }
    let node_error = scratch.partition_error(matrix, &users);

    // best splitter: argmin over candidate items of the tri-partition error;
    // ties break toward the lowest item index
    let mut best: Option<(u32, f64)> = None;
    for item in 0..matrix.n_items() as u32 {
        let (like, dislike, unknown) = partition_users(matrix, &users, item, threshold);
        let degenerate = like.len() == users.len()
            || dislike.len() == users.len()
            || unknown.len() == users.len();
        let err = if degenerate {
            // single-partition split is identical to the unsplit node
            node_error
        } else {
            scratch.partition_error(matrix, &like)
                + scratch.partition_error(matrix, &dislike)
                + scratch.partition_error(matrix, &unknown)
        };
        if best.map(|(_, e)| err < e).unwrap_or(true) {
            best = Some((item, err));
        }
    }
    let (item, error) = best?;

    // only the root may stand without improving on the unsplit error
    if !is_root && error >= node_error {
        return None;
    }

    let mut node = TreeNode {
        item,
        users,
        error,
        like: None,
        dislike: None,
        unknown: None,
    };
    if depth < budget && error < node_error {
        let (like, dislike, unknown) = partition_users(matrix, &node.users, item, threshold);
        for (slot, part) in [
            (&mut node.like, like),
            (&mut node.dislike, dislike),
            (&mut node.unknown, unknown),
        ] {
            if part.len() >= 2 {
                *slot = build_node(matrix, part, threshold, depth + 1, budget, scratch, false);
            }
        }
    }
    Some(Box::new(node))
}

/// Walk the tree along the edges implied by the interview so far and return
/// the item asked at the node reached, or `None` when the interview has
/// walked off the tree.
pub fn dt_next_item(tree: &DecisionTree, path: &[AskOutcome]) -> Option<u32> {
    let mut node = tree.root.as_deref()?;
    for outcome in path {
        debug_assert_eq!(outcome.item, node.item, "interview path diverged from tree");
        let next = match outcome.response {
            Response::Rated(r) if r >= tree.threshold => &node.like,
            Response::Rated(_) => &node.dislike,
            Response::Unknown => &node.unknown,
        };
        node = next.as_deref()?;
    }
    Some(node.item)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::RatingScale;

    fn scale() -> RatingScale {
        RatingScale::new(1.0, 10.0).unwrap()
    }

    #[test]
    fn one_item_dataset_cannot_expand() {
        let m = RatingMatrix::from_triples(
            scale(),
            &[("a", "x", 2.0), ("b", "x", 9.0), ("c", "x", 5.0)],
        )
        .unwrap();
        let tree = build_decision_tree(&m, 7).unwrap();
        let root = tree.root.as_ref().unwrap();
        assert_eq!(root.item, m.item_index("x").unwrap());
        assert!(root.like.is_none() && root.dislike.is_none() && root.unknown.is_none());
    }

    #[test]
    fn identical_ratings_build_depth_one() {
        let m = RatingMatrix::from_triples(
            scale(),
            &[
                ("a", "x", 5.0),
                ("a", "y", 5.0),
                ("b", "x", 5.0),
                ("b", "y", 5.0),
            ],
        )
        .unwrap();
        let tree = build_decision_tree(&m, 7).unwrap();
        let root = tree.root.as_ref().unwrap();
        assert_eq!(root.error, 0.0);
        assert_eq!(root.depth(), 1);
    }

    /// Independent split-error oracle: literal transcription of the
    /// definition with no shared code.
    fn split_error_oracle(m: &RatingMatrix, users: &[u32], item: u32, threshold: f64) -> f64 {
        let mut parts: [Vec<u32>; 3] = [vec![], vec![], vec![]];
        for &u in users {
            match m.rating(u, item) {
                Some(r) if r >= threshold => parts[0].push(u),
                Some(_) => parts[1].push(u),
                None => parts[2].push(u),
            }
        }
        let mut total = 0.0;
        for part in &parts {
            for &v in part {
                for &(j, r) in m.user_ratings(v) {
                    // partition mean for item j
                    let mut sum = 0.0;
                    let mut n = 0.0;
                    for &w in part {
                        if let Some(rw) = m.rating(w, j) {
                            sum += rw;
                            n += 1.0;
                        }
                    }
                    let pred = sum / n; // v itself rated j, so n >= 1
                    total += (pred - r) * (pred - r);
                }
            }
        }
        total
    }

    #[test]
    fn root_split_matches_exhaustive_oracle() {
        // six users, three items with distinctly different split qualities
        let m = RatingMatrix::from_triples(
            scale(),
            &[
                ("a", "x", 9.0),
                ("a", "y", 8.0),
                ("a", "z", 3.0),
                ("b", "x", 8.0),
                ("b", "y", 9.0),
                ("c", "x", 2.0),
                ("c", "y", 2.0),
                ("c", "z", 8.0),
                ("d", "x", 1.0),
                ("d", "z", 7.0),
                ("e", "x", 9.0),
                ("e", "y", 7.0),
                ("e", "z", 2.0),
                ("f", "y", 3.0),
                ("f", "z", 9.0),
            ],
        )
        .unwrap();
        let tree = build_decision_tree(&m, 7).unwrap();
        let threshold = global_mean(&m).unwrap();
        let users: Vec<u32> = (0..6).collect();
        let mut oracle: Vec<(u32, f64)> = (0..3u32)
            .map(|i| (i, split_error_oracle(&m, &users, i, threshold)))
            .collect();
        oracle.sort_by(|(ia, ea), (ib, eb)| ea.total_cmp(eb).then(ia.cmp(ib)));
        let root = tree.root.as_ref().unwrap();
        assert_eq!(root.item, oracle[0].0);
        assert!((root.error - oracle[0].1).abs() < 1e-9);
    }

    #[test]
    fn partitions_are_exact_tripartitions() {
        let m = RatingMatrix::from_triples(
            scale(),
            &[
                ("a", "x", 9.0),
                ("a", "y", 2.0),
                ("b", "x", 8.0),
                ("b", "y", 9.0),
                ("c", "y", 2.0),
                ("c", "z", 8.0),
                ("d", "x", 1.0),
                ("d", "z", 7.0),
                ("e", "x", 9.0),
                ("e", "z", 2.0),
                ("f", "y", 3.0),
                ("f", "z", 9.0),
            ],
        )
        .unwrap();
        let tree = build_decision_tree(&m, 7).unwrap();
        fn check(node: &TreeNode, m: &RatingMatrix, threshold: f64) {
            let (like, dislike, unknown) =
                partition_users(m, &node.users, node.item, threshold);
            let mut combined = [like.clone(), dislike.clone(), unknown.clone()].concat();
            combined.sort_unstable();
            let mut users = node.users.clone();
            users.sort_unstable();
            assert_eq!(combined, users, "children must partition the parent");
            for (child, part) in [
                (&node.like, like),
                (&node.dislike, dislike),
                (&node.unknown, unknown),
            ] {
                if let Some(c) = child {
                    let mut cu = c.users.clone();
                    cu.sort_unstable();
                    let mut pu = part.clone();
                    pu.sort_unstable();
                    assert_eq!(cu, pu);
                    check(c, m, threshold);
                }
            }
        }
        check(tree.root.as_ref().unwrap(), &m, tree.threshold);
        assert!(tree.root.as_ref().unwrap().depth() <= 7);
    }

    #[test]
    fn walk_follows_edges() {
        // hand-built tree: root asks item 0; like -> item 1, whose unknown
        // child asks item 2
        let leaf = TreeNode {
            item: 2,
            users: vec![],
            error: 0.0,
            like: None,
            dislike: None,
            unknown: None,
        };
        let mid = TreeNode {
            item: 1,
            users: vec![],
            error: 0.0,
            like: None,
            dislike: None,
            unknown: Some(Box::new(leaf)),
        };
        let root = TreeNode {
            item: 0,
            users: vec![],
            error: 0.0,
            like: Some(Box::new(mid)),
            dislike: None,
            unknown: None,
        };
        let tree = DecisionTree {
            threshold: 5.0,
            root: Some(Box::new(root)),
        };

        // empty state -> root item
        assert_eq!(dt_next_item(&tree, &[]), Some(0));
        // (like, unknown) -> the item at root.like.unknown
        let path = vec![
            AskOutcome {
                item: 0,
                response: Response::Rated(7.0),
            },
            AskOutcome {
                item: 1,
                response: Response::Unknown,
            },
        ];
        assert_eq!(dt_next_item(&tree, &path), Some(2));
        // walking further than the tree is deep -> exhausted
        let mut long = path.clone();
        long.push(AskOutcome {
            item: 2,
            response: Response::Rated(1.0),
        });
        assert_eq!(dt_next_item(&tree, &long), None);
        // dislike edge is absent -> exhausted immediately
        let missing = vec![AskOutcome {
            item: 0,
            response: Response::Rated(2.0),
        }];
        assert_eq!(dt_next_item(&tree, &missing), None);
    }

    #[test]
    fn threshold_tie_goes_to_like() {
        let tree = DecisionTree {
            threshold: 5.0,
            root: Some(Box::new(TreeNode {
                item: 0,
                users: vec![],
                error: 0.0,
                like: Some(Box::new(TreeNode {
                    item: 1,
                    users: vec![],
                    error: 0.0,
                    like: None,
                    dislike: None,
                    unknown: None,
                })),
                dislike: None,
                unknown: None,
            })),
        };
        let path = vec![AskOutcome {
            item: 0,
            response: Response::Rated(5.0),
        }];
        assert_eq!(dt_next_item(&tree, &path), Some(1));
    }

    #[test]
    fn empty_training_is_an_error() {
        let m = RatingMatrix::new(scale());
        assert!(build_decision_tree(&m, 7).is_err());
    }

    #[test]
    fn node_prediction_falls_back() {
        let m = RatingMatrix::from_triples(
            scale(),
            &[("a", "x", 4.0), ("b", "x", 6.0), ("b", "y", 9.0)],
        )
        .unwrap();
        let node = TreeNode {
            item: 0,
            users: vec![0],
            error: 0.0,
            like: None,
            dislike: None,
            unknown: None,
        };
        let y = m.item_index("y").unwrap();
        let x = m.item_index("x").unwrap();
        // user a never rated y: parent prediction first, then global mean
        assert_eq!(node.predict(&m, y, Some(7.5), 6.33), 7.5);
        assert_eq!(node.predict(&m, y, None, 6.33), 6.33);
        assert_eq!(node.predict(&m, x, Some(7.5), 6.33), 4.0);
    }
}
