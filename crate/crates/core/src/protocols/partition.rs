use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::UserSpec;

/// Disjoint, nonempty groups of user indices covering `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition {
    pub groups: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(groups: Vec<Vec<usize>>) -> Self {
        Self { groups }
    }

    /// Every user in its own group.
    pub fn singletons(n: usize) -> Self {
        Self::new((0..n).map(|k| vec![k]).collect())
    }

    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n];
        for (j, group) in self.groups.iter().enumerate() {
            if group.is_empty() {
                return Err(Error::Parameter(format!("group {j} is empty")));
            }
            for &k in group {
                match seen.get_mut(k) {
                    None => {
                        return Err(Error::Parameter(format!(
                            "group {j} names user {k}, only {n} users"
                        )))
                    }
                    Some(true) => {
                        return Err(Error::Parameter(format!("user {k} appears twice")))
                    }
                    Some(s) => *s = true,
                }
            }
        }
        if let Some(k) = seen.iter().position(|s| !s) {
            return Err(Error::Parameter(format!("user {k} is in no group")));
        }
        Ok(())
    }
}

/// Greedy grouping for mix-and-match.
///
/// Users are sorted by decreasing sample count (ties by index) and poured into
/// consecutive groups, each closed as soon as its budgets sum to at least
/// `group_budget`. Sorting keeps similar `m` together, so each group's minimum
/// wastes little. A trailing group that falls short is merged into the
/// previous one.
pub fn greedy_partition(users: &[UserSpec], group_budget: usize) -> Result<Partition> {
    let total: usize = users.iter().map(|u| u.ell).sum();
    if users.is_empty() || total < group_budget {
        return Err(Error::InfeasiblePartition(format!(
            "total budget {total} below the per-group requirement {group_budget}"
        )));
    }
    let mut order: Vec<usize> = (0..users.len()).collect();
    order.sort_by(|&a, &b| users[b].m.cmp(&users[a].m).then(a.cmp(&b)));

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut current = Vec::new();
    let mut acc = 0;
    for k in order {
        current.push(k);
        acc += users[k].ell;
        if acc >= group_budget {
            groups.push(std::mem::take(&mut current));
            acc = 0;
        }
    }
    if !current.is_empty() {
        groups
            .last_mut()
            .expect("total budget covers at least one group")
            .extend(current);
    }
    Ok(Partition::new(groups))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn specs(pairs: &[(usize, usize)]) -> Vec<UserSpec> {
        pairs.iter().map(|&(m, ell)| UserSpec { m, ell }).collect()
    }

    #[test]
    fn rich_users_stand_alone() {
        let users = specs(&[(7, 56), (14, 60), (28, 100)]);
        let p = greedy_partition(&users, 56).unwrap();
        assert_eq!(p.groups, vec![vec![2], vec![1], vec![0]]);
    }

    #[test]
    fn one_bit_users_fill_groups_of_eight() {
        let users = specs(&[(7, 1); 24]);
        let p = greedy_partition(&users, 8).unwrap();
        assert_eq!(p.num_groups(), 3);
        assert!(p.groups.iter().all(|g| g.len() == 8));
        p.validate(24).unwrap();
    }

    #[test]
    fn just_short_is_infeasible() {
        let users = specs(&[(7, 1); 7]);
        assert!(matches!(
            greedy_partition(&users, 8),
            Err(Error::InfeasiblePartition(_))
        ));
    }

    #[test]
    fn leftovers_join_last_group() {
        let users = specs(&[(7, 4); 5]);
        let p = greedy_partition(&users, 8).unwrap();
        assert_eq!(p.groups, vec![vec![0, 1], vec![2, 3, 4]]);
    }

    #[test]
    fn validate_catches_bad_partitions() {
        assert!(Partition::new(vec![vec![0], vec![0, 1]]).validate(2).is_err());
        assert!(Partition::new(vec![vec![0]]).validate(2).is_err());
        assert!(Partition::new(vec![vec![0, 5]]).validate(2).is_err());
        assert!(Partition::new(vec![vec![], vec![0, 1]]).validate(2).is_err());
        Partition::singletons(3).validate(3).unwrap();
    }

    #[test]
    fn serializes_as_index_arrays() {
        let p = Partition::new(vec![vec![0, 2], vec![1]]);
        assert_eq!(serde_json::to_string(&p).unwrap(), "[[0,2],[1]]");
    }

    proptest! {
        #[test]
        fn greedy_groups_are_valid_and_funded(
            pairs in prop::collection::vec((1usize..50, 1usize..20), 1..60),
            budget in 1usize..40,
        ) {
            let users = specs(&pairs);
            match greedy_partition(&users, budget) {
                Ok(p) => {
                    p.validate(users.len()).unwrap();
                    for g in &p.groups {
                        prop_assert!(g.iter().map(|&k| users[k].ell).sum::<usize>() >= budget);
                    }
                }
                Err(_) => prop_assert!(users.iter().map(|u| u.ell).sum::<usize>() < budget),
            }
        }
    }
}
