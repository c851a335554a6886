//! Unknown initial distance: the schedule planned for `d = 1` is measured by
//! the kinematic oracle against targets at their true distance.

use crate::catalog::{algorithm2, CatalogEntry};
use crate::engine::{catch_round, Side, Target};
use crate::numerics::Real;
use crate::oracle::{intersect, Intercept, Trajectory};
use crate::verify::upper::BoundSpec;
use crate::verify::{certified, log2_margin, CheckRecord, VerifyError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// `ud ≤ 4`: `CR ≤ 1 + 8/d`.
    Plateau,
    /// `ud > 4`: `CR ≤ 1 + (F(ud) − 1)/d`.
    Growth,
}

#[derive(Clone, Debug)]
pub struct UnknownDReport {
    pub u: Real,
    pub d: Real,
    pub precision_bits: usize,
    /// Oracle catch times of `(u, d, σ)` and `(ud, 1, σ)` per side.
    pub times: [(Real, Real); 2],
    pub cr: Real,
    pub cr_ud: Real,
    pub bound: Real,
    pub branch: Branch,
    /// `log₂ T(ud, 1, σ) − log₂ T(u, d, σ)` per side.
    pub dominance_margins: [Real; 2],
    /// Margin of `CR(u, d) ≤ 1 + (CR(ud, 1) − 1)/d`.
    pub intermediate_margin: Real,
    /// Margin of the two-branch bound.
    pub bound_margin: Real,
}

impl UnknownDReport {
    pub fn passed(&self) -> bool {
        self.dominance_margins.iter().all(certified) && certified(&self.intermediate_margin) && certified(&self.bound_margin)
    }

    pub fn records(&self) -> Vec<CheckRecord> {
        let u = self.u.to_shortest(12);
        let d = self.d.to_shortest(12);
        let tag = format!("u={u:0>8}/d={d:0>8}");
        let base = |name: String| {
            CheckRecord::new(format!("unknown_d/{name}/{tag}"), self.precision_bits).param("u", &u).param("d", &d)
        };
        let mut out: Vec<CheckRecord> = Side::BOTH
            .iter()
            .map(|s| base(format!("dominance/side={s}")).margin(&self.dominance_margins[s.index()]))
            .collect();
        out.push(base("intermediate".into()).margin(&self.intermediate_margin));
        out.push(
            base("theorem".into())
                .param(
                    "branch",
                    match self.branch {
                        Branch::Plateau => "ud<=4",
                        Branch::Growth => "ud>4",
                    },
                )
                .margin(&self.bound_margin),
        );
        out
    }
}

fn oracle_time(traj: &Trajectory, target: &Target) -> Result<Real, VerifyError> {
    match intersect(traj, target)? {
        Intercept::Caught(c) => Ok(c.time),
        Intercept::NotCaught { .. } => Err(VerifyError::NotCaught(format!(
            "(u = {}, d = {}, side {})",
            target.u(),
            target.d(),
            target.side()
        ))),
    }
}

/// Measures `CR(u, d)` and `CR(ud, 1)` of the unknown-distance schedule with
/// the oracle and checks dominance per side, the intermediate inequality and
/// the two-branch bound.
pub fn check_unknown_d_bound(u: &Real, d: &Real, horizon: usize) -> Result<UnknownDReport, VerifyError> {
    let p = u.precision().max(d.precision());
    let entry: CatalogEntry = algorithm2(p);
    let ud = u * d;
    let rounds = Side::BOTH
        .iter()
        .map(|&s| catch_round(&entry.spec, &ud, s, horizon))
        .collect::<Result<Vec<_>, _>>()?;
    let traj = entry.trajectory(d, rounds.iter().max().expect("two sides") + 1)?;
    let one = Real::one(p);
    let mut times: Vec<(Real, Real)> = Vec::with_capacity(2);
    for side in Side::BOTH {
        // The trajectory is widened for exact vertex sums; its turn points only carry p bits.
        let t = oracle_time(&traj, &Target::new(u.clone(), d.clone(), side)?)?.with_precision(p)?;
        let t_ud = oracle_time(&traj, &Target::new(ud.clone(), one.clone(), side)?)?.with_precision(p)?;
        times.push((t, t_ud));
    }
    let times: [(Real, Real); 2] = times.try_into().expect("two sides");
    let cr = times.iter().map(|(t, _)| t / &ud).fold(one.clone(), |a, b| a.max(&b));
    let cr_ud = times.iter().map(|(_, t)| t / &ud).fold(one.clone(), |a, b| a.max(&b));
    let intermediate = &one + &((&cr_ud - &one) / d);
    let (branch, bound) = if ud <= Real::from_u64(4, p) {
        (Branch::Plateau, &one + &(Real::from_u64(8, p) / d))
    } else {
        let f = BoundSpec::known_distance(p).f(&ud);
        (Branch::Growth, &one + &((f - &one) / d))
    };
    Ok(UnknownDReport {
        dominance_margins: [log2_margin(&times[0].0, &times[0].1), log2_margin(&times[1].0, &times[1].1)],
        intermediate_margin: log2_margin(&cr, &intermediate),
        bound_margin: log2_margin(&cr, &bound),
        u: u.clone(),
        d: d.clone(),
        precision_bits: p,
        times,
        cr,
        cr_ud,
        bound,
        branch,
    })
}
