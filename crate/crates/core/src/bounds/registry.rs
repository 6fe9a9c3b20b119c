use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::families::FamilyKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tier {
    Theorem,
    Conjecture,
    LemmaGadget,
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tier::Theorem => "theorem",
            Tier::Conjecture => "conjecture",
            Tier::LemmaGadget => "lemma-gadget",
        })
    }
}

/// Registry entries. The string forms are stable and used in reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundId {
    AndersonMorley,
    AmEdgewise,
    GroneMerrisLower,
    Bai,
    Brouwer,
    WeakBrouwerOld,
    DegreeSumMain,
    WitnessMaxForm,
    BinomComplex,
    KSquared,
    MainPlusBai,
    BrouwerMinBinom,
    PartiteDegreeSum,
    DuvalReiner,
    HigherBrouwer,
    BrouwerPlus,
    Induced2k,
    HereditaryF(FamilyKind),
    Lambda1Fww,
    Lambda1FrPlusR,
    SignlessDegreeSum,
    SignlessAot,
    SignlessTrianglefreeK2,
    SignlessBinomComplex,
    SignlessPartiteDegreeSum,
    SignlessDuvalReiner,
    SignlessInduced2k,
    SignlessHereditaryF(FamilyKind),
}

const HEREDITARY: [FamilyKind; 7] = [
    FamilyKind::Forest,
    FamilyKind::MaxDegree,
    FamilyKind::Planar,
    FamilyKind::SquareFree,
    FamilyKind::Girth5,
    FamilyKind::NoPath,
    FamilyKind::NoLongCycle,
];

/// The bounded-degree instantiation has no signless counterpart.
const SIGNLESS_HEREDITARY: [FamilyKind; 6] = [
    FamilyKind::Forest,
    FamilyKind::Planar,
    FamilyKind::SquareFree,
    FamilyKind::Girth5,
    FamilyKind::NoPath,
    FamilyKind::NoLongCycle,
];

/// Which operator supplies the eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Operator {
    Signed,
    Signless,
}

impl BoundId {
    /// Every registered id, in registry order.
    pub fn all() -> Vec<BoundId> {
        use BoundId::*;
        let mut v = vec![
            AndersonMorley,
            AmEdgewise,
            GroneMerrisLower,
            Bai,
            Brouwer,
            WeakBrouwerOld,
            DegreeSumMain,
            WitnessMaxForm,
            BinomComplex,
            KSquared,
            MainPlusBai,
            BrouwerMinBinom,
            PartiteDegreeSum,
            DuvalReiner,
            HigherBrouwer,
            BrouwerPlus,
            Induced2k,
        ];
        v.extend(HEREDITARY.iter().map(|f| HereditaryF(*f)));
        v.extend([
            Lambda1Fww,
            Lambda1FrPlusR,
            SignlessDegreeSum,
            SignlessAot,
            SignlessTrianglefreeK2,
            SignlessBinomComplex,
            SignlessPartiteDegreeSum,
            SignlessDuvalReiner,
            SignlessInduced2k,
        ]);
        v.extend(SIGNLESS_HEREDITARY.iter().map(|f| SignlessHereditaryF(*f)));
        v
    }

    pub fn name(self) -> String {
        use BoundId::*;
        let s = match self {
            AndersonMorley => "anderson_morley",
            AmEdgewise => "am_edgewise",
            GroneMerrisLower => "grone_merris_lower",
            Bai => "bai",
            Brouwer => "brouwer",
            WeakBrouwerOld => "weak_brouwer_old",
            DegreeSumMain => "degree_sum_main",
            WitnessMaxForm => "witness_max_form",
            BinomComplex => "binom_complex",
            KSquared => "k_squared",
            MainPlusBai => "main_plus_bai",
            BrouwerMinBinom => "brouwer_min_binom",
            PartiteDegreeSum => "partite_degree_sum",
            DuvalReiner => "duval_reiner",
            HigherBrouwer => "higher_brouwer",
            BrouwerPlus => "brouwer_plus",
            Induced2k => "induced_2k",
            HereditaryF(f) => return format!("hereditary_f:{}", f.name()),
            Lambda1Fww => "lambda1_fww",
            Lambda1FrPlusR => "lambda1_fr_plus_r",
            SignlessDegreeSum => "signless_degree_sum",
            SignlessAot => "signless_aot",
            SignlessTrianglefreeK2 => "signless_trianglefree_k2",
            SignlessBinomComplex => "signless_binom_complex",
            SignlessPartiteDegreeSum => "signless_partite_degree_sum",
            SignlessDuvalReiner => "signless_duval_reiner",
            SignlessInduced2k => "signless_induced_2k",
            SignlessHereditaryF(f) => return format!("signless_hereditary_f:{}", f.name()),
        };
        s.to_string()
    }

    /// Resolves a comma-free selector: an id, `all`, `hereditary_f` or
    /// `signless_hereditary_f`.
    pub fn expand(selector: &str) -> Result<Vec<BoundId>> {
        match selector.trim() {
            "all" | "all-applicable" => Ok(Self::all()),
            "hereditary_f" => Ok(HEREDITARY
                .iter()
                .map(|f| BoundId::HereditaryF(*f))
                .collect()),
            "signless_hereditary_f" => Ok(SIGNLESS_HEREDITARY
                .iter()
                .map(|f| BoundId::SignlessHereditaryF(*f))
                .collect()),
            s => Ok(vec![s.parse()?]),
        }
    }

    /// Parses `id,id,...` with selector expansion; duplicates dropped.
    pub fn parse_list(list: &str) -> Result<Vec<BoundId>> {
        let mut out = Vec::new();
        for part in list.split(',').filter(|s| !s.trim().is_empty()) {
            for id in Self::expand(part)? {
                if !out.contains(&id) {
                    out.push(id);
                }
            }
        }
        if out.is_empty() {
            return Err(Error::UnknownBound(list.to_string()));
        }
        Ok(out)
    }

    /// Tier as registered; `duval_reiner` is promoted to a theorem per instance
    /// when `r = 1` or the complex is `(r+1)`-partite and `r`-dimensional.
    pub fn base_tier(self) -> Tier {
        use BoundId::*;
        match self {
            Brouwer | HigherBrouwer | BrouwerPlus | SignlessAot | DuvalReiner => Tier::Conjecture,
            _ => Tier::Theorem,
        }
    }

    pub fn operator(self) -> Operator {
        use BoundId::*;
        match self {
            SignlessDegreeSum
            | SignlessAot
            | SignlessTrianglefreeK2
            | SignlessBinomComplex
            | SignlessPartiteDegreeSum
            | SignlessDuvalReiner
            | SignlessInduced2k
            | SignlessHereditaryF(_) => Operator::Signless,
            _ => Operator::Signed,
        }
    }

    /// Stated for graphs only (`r = 1`, dimension at most 1).
    pub fn graph_only(self) -> bool {
        use BoundId::*;
        matches!(
            self,
            AndersonMorley
                | AmEdgewise
                | GroneMerrisLower
                | Bai
                | Brouwer
                | WeakBrouwerOld
                | KSquared
                | MainPlusBai
                | BrouwerMinBinom
                | BrouwerPlus
                | Induced2k
                | HereditaryF(_)
                | SignlessAot
                | SignlessTrianglefreeK2
                | SignlessInduced2k
                | SignlessHereditaryF(_)
        )
    }

    /// Needs an `(r+1)`-partite `r`-dimensional complex.
    pub fn needs_partite(self) -> bool {
        matches!(
            self,
            BoundId::PartiteDegreeSum
                | BoundId::SignlessPartiteDegreeSum
                | BoundId::SignlessDuvalReiner
        )
    }

    /// The family the bound is conditional on, if any.
    pub fn family(self) -> Option<FamilyKind> {
        match self {
            BoundId::HereditaryF(f) | BoundId::SignlessHereditaryF(f) => Some(f),
            BoundId::SignlessTrianglefreeK2 => Some(FamilyKind::TriangleFree),
            _ => None,
        }
    }

    /// `lhs >= rhs` is asserted instead of `lhs <= rhs`.
    pub fn is_lower_bound(self) -> bool {
        self == BoundId::GroneMerrisLower
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for BoundId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let family = |rest: &str, allowed: &[FamilyKind]| {
            FamilyKind::from_name(rest)
                .filter(|f| allowed.contains(f))
                .ok_or_else(|| Error::UnknownBound(s.into()))
        };
        if let Some(rest) = s.strip_prefix("signless_hereditary_f:") {
            return Ok(BoundId::SignlessHereditaryF(family(
                rest,
                &SIGNLESS_HEREDITARY,
            )?));
        }
        if let Some(rest) = s.strip_prefix("hereditary_f:") {
            return Ok(BoundId::HereditaryF(family(rest, &HEREDITARY)?));
        }
        Self::all()
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::UnknownBound(s.into()))
    }
}

impl Serialize for BoundId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

impl<'de> Deserialize<'de> for BoundId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_roundtrip() {
        let all = BoundId::all();
        assert_eq!(all.len(), 17 + 7 + 9 + 6);
        for id in all {
            assert_eq!(id.name().parse::<BoundId>().unwrap(), id);
        }
    }

    #[test]
    fn selectors() {
        assert_eq!(BoundId::parse_list("bai,hereditary_f").unwrap().len(), 8);
        assert_eq!(BoundId::parse_list("bai,bai").unwrap(), vec![BoundId::Bai]);
        assert!(BoundId::parse_list("signless_hereditary_f:max_degree").is_err());
        assert!(BoundId::parse_list("nope").is_err());
        assert!(BoundId::parse_list("").is_err());
    }

    #[test]
    fn tiers() {
        assert_eq!(BoundId::Brouwer.base_tier(), Tier::Conjecture);
        assert_eq!(BoundId::KSquared.base_tier(), Tier::Theorem);
        assert_eq!(
            serde_json::to_string(&Tier::LemmaGadget).unwrap(),
            "\"lemma-gadget\""
        );
    }
}
