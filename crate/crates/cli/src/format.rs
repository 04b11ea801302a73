//! JSON input files.
//!
//! Every scalar is an exact string: a rational is `"p"` or `"p/q"`, a field
//! element is either a rational string or an array of rational strings
//! giving its coordinates on the power basis `1, θ, θ², …`. JSON numbers
//! are rejected so that no value passes through floating point.

use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use subtori_core::structure::product_torus;
use subtori_core::{
    commensurable, AlgebraicNumber, Commensurability, ComplexBox, ComplexSubgroupSpec, ComplexTorus, EllipticCurveSpec,
    FieldSpec, Mat, RationalSubspace, Q,
};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldJson {
    pub min_poly: Vec<Value>,
    pub root_box: Vec<Value>,
    pub conj_image: Vec<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub imag_unit: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusJson {
    pub n: usize,
    pub generators: Vec<Vec<Value>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveJson {
    pub omega1: Value,
    pub omega2: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusFile {
    pub field: FieldJson,
    pub torus: TorusJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub product_form: Option<Vec<CurveJson>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubgroupFile {
    pub basis: Vec<Vec<Value>>,
}

/// Integer column vectors in lattice coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubtorusFile {
    pub basis: Vec<Vec<Value>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveFile {
    pub field: FieldJson,
    pub curve: CurveJson,
}

/// A validated torus file.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedTorus {
    pub torus: ComplexTorus,
    pub product_form: Option<Vec<EllipticCurveSpec>>,
    pub labels: BTreeMap<String, String>,
}

pub fn parse_rational(v: &Value, at: &str) -> CliResult<Q> {
    let Value::String(s) = v else {
        return Err(CliError::input("malformed_rational", format!("{at}: expected a rational string, found {v}")));
    };
    parse_rational_str(s).ok_or_else(|| CliError::input("malformed_rational", format!("{at}: {s:?} is not of the form p or p/q")))
}

fn parse_int_str(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

pub fn parse_rational_str(s: &str) -> Option<Q> {
    match s.split_once('/') {
        None => parse_int_str(s).map(Q::from_integer),
        Some((p, q)) => {
            let (p, q) = (parse_int_str(p)?, parse_int_str(q)?);
            if q.is_zero() || q < BigInt::zero() {
                return None;
            }
            Some(Q::new(p, q))
        }
    }
}

pub fn parse_integer(v: &Value, at: &str) -> CliResult<BigInt> {
    let q = parse_rational(v, at)?;
    if !q.is_integer() {
        return Err(CliError::input("malformed_integer", format!("{at}: {q} is not an integer")));
    }
    Ok(q.to_integer())
}

fn rationals(vs: &[Value], at: &str) -> CliResult<Vec<Q>> {
    vs.iter().enumerate().map(|(k, v)| parse_rational(v, &format!("{at}[{k}]"))).collect()
}

pub fn parse_element(field: &FieldSpec, v: &Value, at: &str) -> CliResult<AlgebraicNumber> {
    match v {
        Value::String(_) => Ok(field.from_rational(parse_rational(v, at)?)),
        Value::Array(items) => field.element(rationals(items, at)?).map_err(|e| CliError::from(e).at(at)),
        _ => Err(CliError::input("malformed_rational", format!("{at}: expected a string or an array of strings"))),
    }
}

pub fn parse_field(f: &FieldJson) -> CliResult<FieldSpec> {
    let min_poly = rationals(&f.min_poly, "field.min_poly")?;
    if f.root_box.len() != 4 {
        return Err(CliError::input(
            "invalid_root_box",
            format!("field.root_box: expected four corners [re_lo, im_lo, re_hi, im_hi], got {}", f.root_box.len()),
        ));
    }
    let c = rationals(&f.root_box, "field.root_box")?;
    let root_box = ComplexBox::from_corners(c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone())
        .ok_or_else(|| CliError::input("invalid_root_box", "field.root_box: lower corner exceeds upper corner"))?;
    let conj = rationals(&f.conj_image, "field.conj_image")?;
    let spec = match &f.imag_unit {
        None => FieldSpec::new(min_poly, root_box, conj),
        Some(v) => {
            let items = match v {
                Value::Array(items) => rationals(items, "field.imag_unit")?,
                other => vec![parse_rational(other, "field.imag_unit")?],
            };
            FieldSpec::with_imag_unit(min_poly, root_box, conj, items)
        }
    };
    spec.map_err(|e| CliError::from(e).at("field"))
}

fn parse_curve(field: &FieldSpec, c: &CurveJson, at: &str) -> CliResult<EllipticCurveSpec> {
    let w1 = parse_element(field, &c.omega1, &format!("{at}.omega1"))?;
    let w2 = parse_element(field, &c.omega2, &format!("{at}.omega2"))?;
    EllipticCurveSpec::new(field.clone(), w1, w2).map_err(|e| CliError::from(e).at(at))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<(T, Vec<u8>)> {
    let bytes = std::fs::read(path).map_err(|e| CliError::input("io_error", format!("{}: {e}", path.display())))?;
    let value = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::input("malformed_json", format!("{}: {e}", path.display())))?;
    Ok((value, bytes))
}

pub fn load_torus_file(f: &TorusFile) -> CliResult<LoadedTorus> {
    let field = parse_field(&f.field)?;
    let n = f.torus.n;
    if f.torus.generators.len() != 2 * n {
        return Err(CliError::input(
            "dimension_mismatch",
            format!("torus.generators: expected {} generators for n = {n}, got {}", 2 * n, f.torus.generators.len()),
        ));
    }
    let mut gens = Vec::with_capacity(2 * n);
    for (j, g) in f.torus.generators.iter().enumerate() {
        if g.len() != n {
            return Err(CliError::input(
                "dimension_mismatch",
                format!("torus.generators[{j}]: expected {n} entries, got {}", g.len()),
            ));
        }
        gens.push(
            g.iter()
                .enumerate()
                .map(|(i, v)| parse_element(&field, v, &format!("torus.generators[{j}][{i}]")))
                .collect::<CliResult<Vec<_>>>()?,
        );
    }
    let torus = ComplexTorus::new(field.clone(), gens).map_err(|e| CliError::from(e).at("torus.generators"))?;
    let product_form = match &f.product_form {
        None => None,
        Some(curves) => {
            if curves.len() != n {
                return Err(CliError::input(
                    "product_form_mismatch",
                    format!("product_form: expected {n} curves, got {}", curves.len()),
                ));
            }
            let curves = curves
                .iter()
                .enumerate()
                .map(|(k, c)| parse_curve(&field, c, &format!("product_form[{k}]")))
                .collect::<CliResult<Vec<_>>>()?;
            let product = product_torus(&curves)?;
            if let Commensurability::No { .. } = commensurable(&torus, &product)? {
                return Err(CliError::input(
                    "product_form_mismatch",
                    "product_form: the product lattice is not commensurable with the torus lattice",
                ));
            }
            Some(curves)
        }
    };
    Ok(LoadedTorus { torus, product_form, labels: f.labels.clone() })
}

pub fn parse_torus(path: &Path) -> CliResult<(LoadedTorus, Vec<u8>)> {
    let (file, bytes): (TorusFile, _) = read_json(path)?;
    let t = load_torus_file(&file).map_err(|e| e.at(&path.display().to_string()))?;
    Ok((t, bytes))
}

pub fn parse_subgroup(path: &Path, torus: &ComplexTorus) -> CliResult<(ComplexSubgroupSpec, Vec<u8>)> {
    let (file, bytes): (SubgroupFile, _) = read_json(path)?;
    let ctx = path.display().to_string();
    let field = torus.field();
    let basis = file
        .basis
        .iter()
        .enumerate()
        .map(|(j, v)| {
            v.iter().enumerate().map(|(i, x)| parse_element(field, x, &format!("basis[{j}][{i}]"))).collect::<CliResult<Vec<_>>>()
        })
        .collect::<CliResult<Vec<_>>>()
        .map_err(|e| e.at(&ctx))?;
    let v = ComplexSubgroupSpec::new(field.clone(), torus.n(), basis).map_err(|e| CliError::from(e).at(&ctx))?;
    Ok((v, bytes))
}

pub fn parse_subtorus(path: &Path, torus: &ComplexTorus) -> CliResult<(RationalSubspace, Vec<u8>)> {
    let (file, bytes): (SubtorusFile, _) = read_json(path)?;
    let ctx = path.display().to_string();
    let m = 2 * torus.n();
    let mut cols = Vec::with_capacity(file.basis.len());
    for (j, c) in file.basis.iter().enumerate() {
        if c.len() != m {
            return Err(CliError::input("dimension_mismatch", format!("basis[{j}]: expected {m} entries, got {}", c.len())).at(&ctx));
        }
        cols.push(
            c.iter()
                .enumerate()
                .map(|(i, x)| parse_integer(x, &format!("basis[{j}][{i}]")))
                .collect::<CliResult<Vec<_>>>()
                .map_err(|e| e.at(&ctx))?,
        );
    }
    let w = RationalSubspace::from_integer_columns(&Mat::from_cols(cols, m));
    Ok((w, bytes))
}

pub fn parse_curve_file(path: &Path) -> CliResult<(EllipticCurveSpec, Vec<u8>)> {
    let (file, bytes): (CurveFile, _) = read_json(path)?;
    let ctx = path.display().to_string();
    let field = parse_field(&file.field).map_err(|e| e.at(&ctx))?;
    let c = parse_curve(&field, &file.curve, "curve").map_err(|e| e.at(&ctx))?;
    Ok((c, bytes))
}

pub fn rational_json(q: &Q) -> Value {
    if q.denom().is_one() {
        Value::String(q.numer().to_string())
    } else {
        Value::String(format!("{}/{}", q.numer(), q.denom()))
    }
}

pub fn element_json(x: &AlgebraicNumber) -> Value {
    Value::Array(x.coeffs().iter().map(rational_json).collect())
}

pub fn field_json(f: &FieldSpec) -> FieldJson {
    let b = f.root_box();
    FieldJson {
        min_poly: f.min_poly().coeffs().iter().map(rational_json).collect(),
        root_box: [&b.re.lo, &b.im.lo, &b.re.hi, &b.im.hi].into_iter().map(rational_json).collect(),
        conj_image: f.conj_image().coeffs().iter().map(rational_json).collect(),
        imag_unit: Some(element_json(&f.i())),
    }
}

fn curve_json(c: &EllipticCurveSpec) -> CurveJson {
    CurveJson { omega1: element_json(c.omega1()), omega2: element_json(c.omega2()) }
}

/// Inverse of [`load_torus_file`].
pub fn torus_file(t: &LoadedTorus) -> TorusFile {
    TorusFile {
        field: field_json(t.torus.field()),
        torus: TorusJson {
            n: t.torus.n(),
            generators: t.torus.generators().iter().map(|g| g.iter().map(element_json).collect()).collect(),
        },
        product_form: t.product_form.as_ref().map(|cs| cs.iter().map(curve_json).collect()),
        labels: t.labels.clone(),
    }
}

pub fn curve_file(c: &EllipticCurveSpec) -> CurveFile {
    CurveFile { field: field_json(c.field()), curve: curve_json(c) }
}
