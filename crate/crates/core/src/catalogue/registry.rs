//! String specs for catalogue varieties.
//!
//! ```text
//! twisted_cubic | conic | rnc:<N> | trig:<N>[,seed=<s>] | veronese | symmetroid
//! segre:<m>,<n>
//! torse:<curve>,l=<l>
//! join:<curve>,<curve>,N=<N>
//! cone:<base>,l=<l>[,N=<N>]
//! cone_segre:<m>,<n>,l=<l>
//! ```
//! where `<curve>` is `twisted_cubic`, `conic`, `rnc<K>` or `trig<K>`, and
//! `<base>` is a curve token or `veronese`. Resolved charts are composed with a
//! fixed orthogonal change of ambient coordinates seeded by the spec string.

use nalgebra::DMatrix;

use super::chart::Chart;
use super::constructors::{
    make_cone_over_segre, make_cone_with_new_vertex, make_curve_chart, make_join, make_segre,
    make_symmetroid, make_torse, make_veronese, CurveKind,
};
use crate::error::{Error, Result};
use crate::rng;

struct Args<'a> {
    spec: &'a str,
    positional: Vec<&'a str>,
    named: Vec<(&'a str, &'a str)>,
}

impl<'a> Args<'a> {
    fn parse(spec: &'a str, raw: &'a str) -> Args<'a> {
        let mut positional = Vec::new();
        let mut named = Vec::new();
        for tok in raw.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match tok.split_once('=') {
                Some((k, v)) => named.push((k.trim(), v.trim())),
                None => positional.push(tok),
            }
        }
        Args {
            spec,
            positional,
            named,
        }
    }

    fn bad(&self) -> Error {
        Error::UnknownSpec(self.spec.to_string())
    }

    fn int(&self, text: &str) -> Result<usize> {
        text.parse().map_err(|_| self.bad())
    }

    fn pos(&self, i: usize) -> Result<&'a str> {
        self.positional.get(i).copied().ok_or_else(|| self.bad())
    }

    fn pos_int(&self, i: usize) -> Result<usize> {
        self.int(self.pos(i)?)
    }

    fn named_int(&self, key: &str) -> Result<Option<usize>> {
        self.named
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| self.int(v))
            .transpose()
    }

    fn expect_counts(&self, positional: usize, allowed: &[&str]) -> Result<()> {
        if self.positional.len() != positional
            || self.named.iter().any(|(k, _)| !allowed.contains(k))
        {
            return Err(self.bad());
        }
        Ok(())
    }
}

/// A curve token in its natural ambient space.
fn curve_token(token: &str, spec: &str) -> Result<Chart> {
    let bad = || Error::UnknownSpec(spec.to_string());
    match token {
        "twisted_cubic" => make_curve_chart(CurveKind::TwistedCubic, 3),
        "conic" => make_curve_chart(CurveKind::Conic, 2),
        t if t.starts_with("rnc") => {
            let n: usize = t[3..].parse().map_err(|_| bad())?;
            make_curve_chart(CurveKind::RationalNormal, n)
        }
        t if t.starts_with("trig") => {
            let n: usize = t[4..].parse().map_err(|_| bad())?;
            make_curve_chart(
                CurveKind::Trig {
                    seed: rng::stable_hash(t),
                },
                n,
            )
        }
        _ => Err(bad()),
    }
}

/// Embed a chart into `P^target` by a seeded random linear map.
fn random_embedding(chart: &Chart, target: usize, salt: &str) -> Result<Chart> {
    let coords = chart.ambient_dim() + 1;
    if target + 1 < coords {
        return Err(Error::invalid(format!(
            "cannot embed P^{} into P^{target}",
            coords - 1
        )));
    }
    if target + 1 == coords {
        return Ok(chart.clone());
    }
    let mut r = rng::stream(rng::stable_hash(salt), 3);
    let m: DMatrix<f64> = rng::gaussian_matrix(target + 1, coords, &mut r);
    let expected = chart.expected().cloned().map(|mut e| {
        if e.delta_star == Some(0) {
            e = e.nondegenerate_dual(target);
        }
        e
    });
    let mut out = chart.transformed(&m).without_expected();
    if let Some(e) = expected {
        out = out.with_expected(e);
    }
    Ok(out)
}

/// Resolve a spec string in standard coordinates (no generic coordinate change).
pub fn resolve_raw(spec: &str) -> Result<Chart> {
    let spec = spec.trim();
    let (head, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let args = Args::parse(spec, rest);
    let chart = match head {
        "twisted_cubic" | "conic" | "veronese" | "symmetroid" if !rest.is_empty() => {
            return Err(args.bad())
        }
        "twisted_cubic" | "conic" => curve_token(head, spec)?,
        "veronese" => make_veronese(),
        "symmetroid" => make_symmetroid(),
        "rnc" => {
            args.expect_counts(1, &[])?;
            make_curve_chart(CurveKind::RationalNormal, args.pos_int(0)?)?
        }
        "trig" => {
            args.expect_counts(1, &["seed"])?;
            let n = args.pos_int(0)?;
            let seed = args
                .named_int("seed")?
                .map_or(rng::stable_hash(spec), |s| s as u64);
            make_curve_chart(CurveKind::Trig { seed }, n)?
        }
        "segre" => {
            args.expect_counts(2, &[])?;
            make_segre(args.pos_int(0)?, args.pos_int(1)?)?
        }
        "torse" => {
            args.expect_counts(1, &["l"])?;
            let curve = curve_token(args.pos(0)?, spec)?;
            let l = args.named_int("l")?.ok_or_else(|| args.bad())?;
            make_torse(&curve, l)?.into_chart()
        }
        "join" => {
            args.expect_counts(2, &["N"])?;
            let n = args.named_int("N")?.ok_or_else(|| args.bad())?;
            let c1 = curve_token(args.pos(0)?, spec)?;
            let c2 = curve_token(args.pos(1)?, spec)?;
            let e1 = random_embedding(&c1, n, &format!("{spec}#1"))?.renamed(c1.name());
            let e2 = random_embedding(&c2, n, &format!("{spec}#2"))?.renamed(c2.name());
            make_join(&e1, &e2)?.into_chart()
        }
        "cone" => {
            args.expect_counts(1, &["l", "N"])?;
            let l = args.named_int("l")?.ok_or_else(|| args.bad())?;
            let token = args.pos(0)?;
            let base = if token == "veronese" {
                make_veronese()
            } else {
                curve_token(token, spec)?
            };
            let target = match args.named_int("N")? {
                Some(n) if n < base.ambient_dim() + l => return Err(args.bad()),
                Some(n) => n - l,
                None => base.ambient_dim(),
            };
            let director =
                random_embedding(&base, target, &format!("{spec}#director"))?.renamed(base.name());
            let cone = make_cone_with_new_vertex(&director, l)?;
            let mut expected = director.expected().cloned().unwrap_or_default();
            let (n, r) = (expected.n.unwrap_or(0) + l, expected.r.unwrap_or(0));
            expected = crate::catalogue::ExpectedInvariants::gauss(n, r, "formula");
            if director.expected().and_then(|e| e.delta_star) == Some(0) {
                expected = expected.nondegenerate_dual(target + l);
            }
            cone.into_chart().with_expected(expected)
        }
        "cone_segre" => {
            args.expect_counts(2, &["l"])?;
            let l = args.named_int("l")?.ok_or_else(|| args.bad())?;
            make_cone_over_segre(args.pos_int(0)?, args.pos_int(1)?, l)?.into_chart()
        }
        _ => return Err(args.bad()),
    };
    Ok(chart.renamed(spec))
}

/// Resolve a spec string and compose with its fixed generic coordinate change.
pub fn resolve(spec: &str) -> Result<Chart> {
    let chart = resolve_raw(spec)?;
    let coords = chart.ambient_dim() + 1;
    let mut r = rng::stream(rng::stable_hash(spec.trim()), 1);
    let q = rng::random_orthogonal(coords, &mut r);
    Ok(chart.transformed(&q))
}

/// The ten catalogue charts checked against every theorem.
pub const CATALOGUE: [&str; 10] = [
    "twisted_cubic",
    "torse:twisted_cubic,l=1",
    "join:conic,conic,N=5",
    "cone:conic,l=1,N=4",
    "torse:rnc5,l=2",
    "veronese",
    "symmetroid",
    "segre:1,1",
    "segre:1,2",
    "cone_segre:1,2,l=1",
];

pub fn catalogue() -> Result<Vec<Chart>> {
    CATALOGUE.iter().map(|s| resolve(s)).collect()
}

/// One row of the dimension table with the concrete variety that instantiates it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TableEntry {
    pub example_id: usize,
    pub name: &'static str,
    pub spec: &'static str,
    pub ambient: usize,
    pub n: usize,
    pub l: usize,
    pub r: usize,
    pub l_star: usize,
    pub n_star: usize,
    pub dual_name: Option<&'static str>,
}

pub const TABLE: [TableEntry; 7] = [
    TableEntry {
        example_id: 1,
        name: "Torse (curve)",
        spec: "twisted_cubic",
        ambient: 3,
        n: 1,
        l: 0,
        r: 1,
        l_star: 1,
        n_star: 2,
        dual_name: Some("Torse"),
    },
    TableEntry {
        example_id: 2,
        name: "Hypersurface of rank r",
        spec: "torse:twisted_cubic,l=1",
        ambient: 3,
        n: 2,
        l: 1,
        r: 1,
        l_star: 0,
        n_star: 1,
        dual_name: Some("Tangentially nondegenerate variety"),
    },
    TableEntry {
        example_id: 3,
        name: "Join",
        spec: "join:conic,conic,N=5",
        ambient: 5,
        n: 3,
        l: 1,
        r: 2,
        l_star: 1,
        n_star: 3,
        dual_name: None,
    },
    TableEntry {
        example_id: 4,
        name: "Cone",
        spec: "cone:conic,l=1,N=4",
        ambient: 4,
        n: 2,
        l: 1,
        r: 1,
        l_star: 1,
        n_star: 2,
        dual_name: Some("Hypersurface"),
    },
    TableEntry {
        example_id: 5,
        name: "Multidimensional torse",
        spec: "torse:rnc5,l=2",
        ambient: 5,
        n: 3,
        l: 2,
        r: 1,
        l_star: 1,
        n_star: 2,
        dual_name: Some("Multidimensional torse"),
    },
    TableEntry {
        example_id: 6,
        name: "Hypersurface of rank r in P^(n+1)",
        spec: "torse:rnc4,l=2",
        ambient: 4,
        n: 3,
        l: 2,
        r: 1,
        l_star: 0,
        n_star: 1,
        dual_name: Some("Curve"),
    },
    TableEntry {
        example_id: 7,
        name: "Cubic symmetroid",
        spec: "symmetroid",
        ambient: 5,
        n: 4,
        l: 2,
        r: 2,
        l_star: 0,
        n_star: 2,
        dual_name: Some("Veronese variety"),
    },
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolves_every_catalogue_and_table_spec() {
        for spec in CATALOGUE.iter().chain(TABLE.iter().map(|t| &t.spec)) {
            let c = resolve(spec).unwrap_or_else(|e| panic!("{spec}: {e}"));
            assert_eq!(c.name(), *spec);
        }
    }

    #[test]
    fn table_ambient_dims_match_charts() {
        for row in TABLE {
            assert_eq!(resolve(row.spec).unwrap().ambient_dim(), row.ambient, "{}", row.spec);
        }
    }

    #[test]
    fn unknown_specs_rejected() {
        for bad in [
            "",
            "sphere",
            "segre:1",
            "segre:a,b",
            "torse:twisted_cubic",
            "torse:ellipse,l=1",
            "join:conic,conic",
            "veronese:3",
            "cone:conic,l=1,N=2",
            "segre:1,2,x=3",
        ] {
            assert!(
                matches!(resolve(bad), Err(Error::UnknownSpec(_))),
                "{bad} should be unknown"
            );
        }
    }

    #[test]
    fn generic_coordinates_are_deterministic() {
        let a = resolve("segre:1,2").unwrap();
        let b = resolve("segre:1,2").unwrap();
        let u = [0.1, -0.2, 0.3];
        assert_eq!(a.value(&u).unwrap(), b.value(&u).unwrap());
        assert_ne!(a.value(&u).unwrap(), resolve_raw("segre:1,2").unwrap().value(&u).unwrap());
    }

    #[test]
    fn embedded_join_curves_span_p5() {
        let c = resolve("join:conic,conic,N=5").unwrap();
        assert_eq!(c.ambient_dim(), 5);
        assert_eq!(c.ruling().unwrap().leaf, 1);
    }
}
