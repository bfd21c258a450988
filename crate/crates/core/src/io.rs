//! JSON instance and result files, and certificate checks for results.

use serde::{Deserialize, Serialize};

use crate::dp::{Method, Solution};
use crate::error::{Error, Result};
use crate::game::{
    canonical_response, normalize_instance, payoff, realize_response, GameInstance, Strategy,
};
use crate::oracle::adversary_check;
use crate::scalar::Coord;

/// `{"voters": [...], "k": .., "l": ..}`. Voters may be integers, decimals
/// or `"num/den"` strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub voters: Vec<Coord>,
    pub k: usize,
    pub l: usize,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInstance(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    pub fn to_instance(&self) -> Result<GameInstance> {
        normalize_instance(self.voters.clone(), self.k, self.l)
    }

    pub fn from_instance(game: &GameInstance) -> Self {
        InstanceFile {
            voters: game.voters.as_slice().to_vec(),
            k: game.k,
            l: game.l,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultFile {
    pub gamma: usize,
    pub wins_majority: bool,
    pub p_strategy: Vec<Coord>,
    pub witness_q: Vec<Coord>,
    pub per_tau: Vec<usize>,
    pub method: Method,
}

impl ResultFile {
    /// Packages a solution with an explicit canonical follower response.
    pub fn from_solution(game: &GameInstance, sol: &Solution) -> Result<Self> {
        let (rep, _) = canonical_response(&game.voters, &sol.strategy, game.l);
        let q = realize_response(&game.voters, &sol.strategy, &rep)?;
        Ok(ResultFile {
            gamma: sol.gamma,
            wins_majority: sol.wins_majority(game.voters.len()),
            p_strategy: sol.strategy.points().to_vec(),
            witness_q: q.into_points(),
            per_tau: sol.per_tau.clone(),
            method: sol.method,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInstance(e.to_string()))
    }
}

/// Checks a result against its instance: the witness realizes the canonical
/// response exactly, the leader keeps exactly `gamma` voters against it, and
/// `trials` random follower strategies never do better.
pub fn verify_certificate(
    game: &GameInstance,
    result: &ResultFile,
    trials: usize,
    seed: u64,
) -> Result<()> {
    let fail = |why: String| Err(Error::InternalError(format!("certificate rejected: {why}")));
    let p = Strategy::leader(result.p_strategy.clone());
    if p.len() > game.k {
        return fail(format!(
            "leader uses {} points, budget is {}",
            p.len(),
            game.k
        ));
    }
    let q = Strategy::follower(result.witness_q.clone());
    if q.len() > game.l {
        return fail(format!(
            "witness uses {} points, budget is {}",
            q.len(),
            game.l
        ));
    }
    let n = game.voters.len();
    let canonical = n - canonical_response(&game.voters, &p, game.l).1;
    let against_witness = payoff(&game.voters, &p, &q);
    if against_witness != canonical {
        return fail(format!(
            "witness leaves {against_witness} voters, canonical response leaves {canonical}"
        ));
    }
    if canonical != result.gamma {
        return fail(format!(
            "leader keeps {canonical} voters, result claims {}",
            result.gamma
        ));
    }
    if result.wins_majority != (2 * result.gamma >= n) {
        return fail("majority flag disagrees with gamma".into());
    }
    if let Some(&best) = result.per_tau.iter().max() {
        if best > result.gamma {
            return fail(format!("a threshold run reached {best}, above gamma"));
        }
    }
    if !adversary_check(&game.voters, &p, game.l, result.gamma, trials, seed) {
        return fail("a sampled follower strategy beats the claimed value".into());
    }
    Ok(())
}
