//! Certificate construction, recomputation and verification.
//!
//! A certificate records a command, its serialized inputs, the computed
//! verdicts and optional witnesses. `verify` recomputes the mathematical
//! payload from the inputs and compares it bit-for-bit.

use anyhow::{anyhow, bail, Context};
use num_traits::Zero;
use serde_json::{json, Map, Value};

use qfe_core::extend::{extend_form, find_nonrepresented, lift_isometry, ExtensionCase};
use qfe_core::json as qjson;
use qfe_core::lattice::{
    mod2_squares_sample, psl2_to_so13, sl3_obstruction, tau_conjugate, tau_entry_certificate,
    MoebiusElement,
};
use qfe_core::padic::Place;
use qfe_core::quadform::QuadraticForm;
use qfe_core::rational::{format_rational, rat_int};
use qfe_core::tower::{FieldDescriptor, FieldElement};

pub const SCHEMA_VERSION: &str = "1";

/// Mathematical payload of a certificate: everything `verify` recomputes.
pub struct Payload {
    pub verdicts: Value,
    pub witnesses: Value,
    pub places_checked: Vec<String>,
}

pub fn build_certificate(command: &str, inputs: Value, payload: Payload) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "verdicts": payload.verdicts,
        "witnesses": payload.witnesses,
        "places_checked": payload.places_checked,
        "provenance": {
            "timestamp": chrono::Utc::now().to_rfc3339(),
            "library": format!("qfe-core {}", env!("CARGO_PKG_VERSION")),
            "conventions": {
                "hasse": "product over i < j of (a_i, a_j)_v",
                "psl2_map": "matrix acts on row vectors of x0*x1 + x2^2 + x3^2",
            },
        },
    })
}

fn places_of(f: &QuadraticForm, extra: &[Place]) -> anyhow::Result<Vec<Place>> {
    let coeffs = f.rational_diagonal()?;
    let mut set = qfe_core::localinv::relevant_places(&coeffs)?;
    set.extend(extra.iter().copied());
    Ok(set.into_iter().collect())
}

fn place_strings(places: &[Place]) -> Vec<String> {
    places.iter().map(|p| p.to_string()).collect()
}

fn witness_json(w: &[num_bigint::BigInt]) -> Value {
    Value::Array(w.iter().map(|x| Value::String(x.to_string())).collect())
}

/// Recompute the payload of a command from its serialized inputs. The same
/// function backs both the original run and `verify`.
pub fn compute_payload(command: &str, inputs: &Value) -> anyhow::Result<Payload> {
    match command {
        "analyze" => {
            let f = form_input(inputs, "form")?;
            let over_q = f.descriptor() == &FieldDescriptor::Q;
            let mut verdicts = Map::new();
            verdicts.insert(
                "signature".into(),
                json!(f.signature(qfe_core::Embedding::Identity)?),
            );
            if f.descriptor().height() == 1 {
                verdicts.insert(
                    "signature_conjugate".into(),
                    json!(f.signature(qfe_core::Embedding::Conjugate)?),
                );
            }
            verdicts.insert("admissible".into(), json!(f.is_admissible()?));
            let places = if over_q {
                let profile = f.invariant_profile()?;
                verdicts.insert("profile".into(), qjson::profile_to_json(&profile));
                verdicts.insert("isotropic".into(), json!(f.is_isotropic_global()?));
                places_of(&f, &[])?
            } else {
                Vec::new()
            };
            Ok(Payload {
                verdicts: Value::Object(verdicts),
                witnesses: Value::Null,
                places_checked: place_strings(&places),
            })
        }
        "isotropy" => {
            let f = form_input(inputs, "form")?;
            let extra = places_input(inputs)?;
            let height = height_input(inputs);
            let places = places_of(&f, &extra)?;
            let mut local = Map::new();
            for &p in &places {
                local.insert(p.to_string(), json!(f.is_isotropic_local(p)?));
            }
            let global = f.is_isotropic_global()?;
            let witness = if global {
                f.isotropy_witness(height)?
            } else {
                None
            };
            Ok(Payload {
                verdicts: json!({"local": local, "global": global}),
                witnesses: witness.map(|w| json!({"isotropy": witness_json(&w)})).unwrap_or(Value::Null),
                places_checked: place_strings(&places),
            })
        }
        "represents" => {
            let f = form_input(inputs, "form")?;
            let q = qjson::rational_from_json(
                inputs.get("q").ok_or_else(|| anyhow!("missing q"))?,
            )?;
            let height = height_input(inputs);
            let verdict = f.represents(&q)?;
            let witness = if verdict && !q.is_zero() {
                f.representation_witness(&q, height)?
            } else {
                None
            };
            let mut ext = f.rational_diagonal()?;
            ext.push(-q.clone());
            let places = places_of(&QuadraticForm::diagonal_q(&ext)?, &[])?;
            Ok(Payload {
                verdicts: json!({"represents": verdict}),
                witnesses: witness
                    .map(|(v, t)| {
                        json!({
                            "vector": witness_json(&v),
                            "scale": t.to_string(),
                        })
                    })
                    .unwrap_or(Value::Null),
                places_checked: place_strings(&places),
            })
        }
        "equiv" => {
            let a = form_input(inputs, "form_a")?;
            let b = form_input(inputs, "form_b")?;
            let (eq, report) = a.equivalent_over_q(&b)?;
            let hasse: Vec<Value> = report
                .hasse
                .iter()
                .map(|(p, x, y)| json!([p.to_string(), x, y]))
                .collect();
            let places: Vec<String> =
                report.hasse.iter().map(|(p, _, _)| p.to_string()).collect();
            Ok(Payload {
                verdicts: json!({
                    "equivalent": eq,
                    "rank": [report.rank.0, report.rank.1],
                    "signature": report.signature,
                    "disc": [report.disc.0.to_string(), report.disc.1.to_string()],
                    "hasse": hasse,
                }),
                witnesses: Value::Null,
                places_checked: places,
            })
        }
        "extend" => {
            let f = form_input(inputs, "form")?;
            let forced = inputs
                .get("q")
                .filter(|v| !v.is_null())
                .map(qjson::rational_from_json)
                .transpose()?;
            let r = extend_form(&f, forced.as_ref())?;
            let case = match r.case {
                ExtensionCase::NumberField => "number_field",
                ExtensionCase::HighRank => "high_rank",
                ExtensionCase::IsotropicTernary => "isotropic_ternary",
                ExtensionCase::AnisotropicTernary => "anisotropic_ternary",
            };
            let obstruction = r.obstruction.as_ref().map(|c| {
                json!({
                    "t": format_rational(&c.t),
                    "place": c.place.to_string(),
                    "matches_neg_disc": c.matches_neg_disc,
                    "local_anisotropy": c.local_anisotropy,
                })
            });
            Ok(Payload {
                verdicts: json!({
                    "case": case,
                    "q": qjson::field_element_to_json(&r.q),
                    "scale": qjson::field_element_to_json(&r.scale),
                    "g": qjson::form_to_json(&r.g),
                    "g0": qjson::form_to_json(&r.g0),
                    "admissible": r.g.is_admissible()?,
                    "field_is_Q": r.field_is_q,
                    "input_isotropic": r.input_isotropic,
                    "output_isotropic": r.output_isotropic,
                    "obstruction": obstruction,
                }),
                witnesses: json!({"basechange": qjson::matrix_to_json(&r.that)}),
                places_checked: Vec::new(),
            })
        }
        "missing" => {
            let f = form_input(inputs, "form")?;
            let negative = match inputs.get("sign").and_then(Value::as_str) {
                Some("-") => true,
                Some("+") => false,
                _ => bail!("sign must be '+' or '-'"),
            };
            let (t, cert) = find_nonrepresented(&f, negative)?;
            Ok(Payload {
                verdicts: json!({
                    "t": format_rational(&t),
                    "place": cert.place.to_string(),
                    "matches_neg_disc": cert.matches_neg_disc,
                    "local_anisotropy": cert.local_anisotropy,
                    "represented": false,
                }),
                witnesses: Value::Null,
                places_checked: vec![cert.place.to_string()],
            })
        }
        "lift" => {
            let f = form_input(inputs, "form")?;
            let m_v = inputs
                .get("matrix")
                .ok_or_else(|| anyhow!("missing matrix"))?;
            let m = qjson::matrix_from_json(m_v, f.descriptor())?;
            let forced = inputs
                .get("q")
                .filter(|v| !v.is_null())
                .map(qjson::rational_from_json)
                .transpose()?;
            let ext = extend_form(&f, forced.as_ref())?;
            let lifted = lift_isometry(&f, &ext.g, &m)?;
            Ok(Payload {
                verdicts: json!({
                    "lift": qjson::matrix_to_json(&lifted),
                    "det": qjson::field_element_to_json(&lifted.det()),
                    "g": qjson::form_to_json(&ext.g),
                    "sheet_preserving": qfe_core::lattice::preserves_positive_sheet(&lifted, &ext.g)?,
                }),
                witnesses: Value::Null,
                places_checked: Vec::new(),
            })
        }
        "psl2" => {
            let m = moebius_input(
                inputs
                    .get("moebius")
                    .ok_or_else(|| anyhow!("missing moebius element"))?,
            )?;
            let y = psl2_to_so13(&m)?;
            let f = qfe_core::lattice::so13_form();
            let lifted = y.lift();
            let det_one = lifted.det() == FieldElement::one();
            Ok(Payload {
                verdicts: json!({
                    "image": qjson::rational_matrix_to_json(&y),
                    "isometry": qfe_core::lattice::is_isometry(&lifted, &f)?,
                    "det_one": det_one,
                    "sheet_preserving": qfe_core::lattice::preserves_positive_sheet(&lifted, &f)?,
                    "integral": y.entries().all(|e| e.is_integer()),
                }),
                witnesses: Value::Null,
                places_checked: Vec::new(),
            })
        }
        "demo:tau-cert" => {
            let (a, b) = gaussian_pair(inputs, "pi", (2, 1))?;
            let cert = tau_entry_certificate(&FieldElement::gaussian(rat_int(a), rat_int(b)))?;
            Ok(Payload {
                verdicts: json!({
                    "entry_squared": format_rational(&cert.entry_squared),
                    "entry_rational": cert.entry_rational,
                }),
                witnesses: Value::Null,
                places_checked: Vec::new(),
            })
        }
        "demo:sl3" => {
            let n = int_input(inputs, "n", 2)? as u64;
            let p = int_input(inputs, "P", 1)?;
            let r = sl3_obstruction(n, p)?;
            Ok(Payload {
                verdicts: json!({
                    "integral": r.integral,
                    "sqrt_coefficient": format_rational(&r.sqrt_coefficient),
                    "conjugate": qjson::matrix_to_json(&r.conjugate),
                }),
                witnesses: Value::Null,
                places_checked: Vec::new(),
            })
        }
        "demo:gamma0" => {
            let n = int_input(inputs, "n", 5)? as u64;
            let samples: [[[i64; 2]; 2]; 3] = [[[1, 1], [0, 1]], [[1, 0], [n as i64, 1]], [[1 + n as i64, 1], [n as i64, 1]]];
            let mut results = Vec::new();
            for s in samples {
                let gamma = qfe_core::Matrix::from_rows(
                    s.iter()
                        .map(|row| row.iter().map(|&x| rat_int(x)).collect())
                        .collect(),
                )?;
                let r = tau_conjugate(&gamma, n)?;
                results.push(json!({
                    "gamma": qjson::rational_matrix_to_json(&gamma),
                    "conjugate": qjson::rational_matrix_to_json(&r.matrix),
                    "member": r.member,
                }));
            }
            Ok(Payload {
                verdicts: json!({"n": n, "conjugations": results}),
                witnesses: Value::Null,
                places_checked: Vec::new(),
            })
        }
        "demo:squares" => {
            let l = int_input(inputs, "L", 2)? as usize;
            let tau = MoebiusElement::tau();
            let g1 = MoebiusElement::from_integers((1, 0), (0, 0), (2, 1), (1, 0))?;
            let g2 = MoebiusElement::from_integers((1, 0), (1, 0), (0, 0), (1, 0))?;
            let samples = mod2_squares_sample(&[tau, g1, g2], l)?;
            let all_rational = samples.iter().all(|s| s.rational);
            let items: Vec<Value> = samples
                .iter()
                .map(|s| {
                    json!({
                        "word": s.word,
                        "image": qjson::rational_matrix_to_json(&s.image),
                        "rational": s.rational,
                    })
                })
                .collect();
            Ok(Payload {
                verdicts: json!({"all_rational": all_rational, "count": items.len(), "samples": items}),
                witnesses: Value::Null,
                places_checked: Vec::new(),
            })
        }
        "demo:bianchi" => {
            let gens = [
                ("T", MoebiusElement::from_integers((1, 0), (1, 0), (0, 0), (1, 0))?),
                ("Ti", MoebiusElement::from_integers((1, 0), (0, 1), (0, 0), (1, 0))?),
                ("S", MoebiusElement::from_integers((0, 0), (1, 0), (-1, 0), (0, 0))?),
            ];
            let f = qfe_core::lattice::so13_form();
            let mut images = Vec::new();
            let mut all_ok = true;
            for (name, g) in &gens {
                let y = psl2_to_so13(g)?;
                let ok = qfe_core::lattice::is_isometry(&y.lift(), &f)?
                    && y.entries().all(|e| e.is_integer());
                all_ok &= ok;
                images.push(json!({
                    "generator": name,
                    "image": qjson::rational_matrix_to_json(&y),
                    "integral_isometry": ok,
                }));
            }
            Ok(Payload {
                verdicts: json!({"generators_map_into_so_f_z": all_ok, "images": images}),
                witnesses: Value::Null,
                places_checked: Vec::new(),
            })
        }
        other => bail!("cannot recompute command {other:?}"),
    }
}

/// Verify a certificate: recompute the payload and compare the mathematical
/// fields. Returns the list of mismatched fields (empty = verified).
pub fn verify_certificate(cert: &Value) -> anyhow::Result<Vec<String>> {
    let schema = cert
        .get("schema_version")
        .and_then(Value::as_str)
        .ok_or_else(|| anyhow!("certificate missing schema_version"))?;
    if schema != SCHEMA_VERSION {
        bail!("unsupported schema_version {schema:?} (supported: {SCHEMA_VERSION})");
    }
    let command = cert
        .get("command")
        .and_then(Value::as_str)
        .ok_or_else(|| anyhow!("certificate missing command"))?;
    let inputs = cert
        .get("inputs")
        .ok_or_else(|| anyhow!("certificate missing inputs"))?;
    let fresh = compute_payload(command, inputs)?;
    let mut mismatches = Vec::new();
    compare("verdicts", cert.get("verdicts"), &fresh.verdicts, &mut mismatches);
    compare("witnesses", cert.get("witnesses"), &fresh.witnesses, &mut mismatches);
    let fresh_places = json!(fresh.places_checked);
    compare(
        "places_checked",
        cert.get("places_checked"),
        &fresh_places,
        &mut mismatches,
    );
    Ok(mismatches)
}

fn compare(field: &str, stored: Option<&Value>, fresh: &Value, out: &mut Vec<String>) {
    match stored {
        Some(s) if s == fresh => {}
        Some(s) => out.push(format!(
            "{field}: stored {} != recomputed {}",
            compact(s),
            compact(fresh)
        )),
        None => out.push(format!("{field}: missing (recomputed {})", compact(fresh))),
    }
}

fn compact(v: &Value) -> String {
    let s = v.to_string();
    if s.len() > 120 {
        format!("{}…", &s[..120])
    } else {
        s
    }
}

fn form_input(inputs: &Value, key: &str) -> anyhow::Result<QuadraticForm> {
    let v = inputs
        .get(key)
        .ok_or_else(|| anyhow!("missing input {key:?}"))?;
    qjson::form_from_json(v).with_context(|| format!("bad form in input {key:?}"))
}

fn places_input(inputs: &Value) -> anyhow::Result<Vec<Place>> {
    match inputs.get("places") {
        None | Some(Value::Null) => Ok(Vec::new()),
        Some(Value::Array(items)) => items
            .iter()
            .map(|p| {
                p.as_str()
                    .ok_or_else(|| anyhow!("places entries must be strings"))?
                    .parse::<Place>()
                    .map_err(|e| anyhow!("{e}"))
            })
            .collect(),
        Some(other) => bail!("places must be an array, got {other}"),
    }
}

fn height_input(inputs: &Value) -> u64 {
    inputs
        .get("height_bound")
        .and_then(Value::as_u64)
        .unwrap_or(200)
}

fn int_input(inputs: &Value, key: &str, default: i64) -> anyhow::Result<i64> {
    match inputs.get(key) {
        None | Some(Value::Null) => Ok(default),
        Some(v) => v
            .as_i64()
            .ok_or_else(|| anyhow!("{key} must be an integer")),
    }
}

fn gaussian_pair(inputs: &Value, key: &str, default: (i64, i64)) -> anyhow::Result<(i64, i64)> {
    match inputs.get(key) {
        None | Some(Value::Null) => Ok(default),
        Some(Value::Array(parts)) if parts.len() == 2 => {
            let a = parts[0].as_i64().ok_or_else(|| anyhow!("bad {key}"))?;
            let b = parts[1].as_i64().ok_or_else(|| anyhow!("bad {key}"))?;
            Ok((a, b))
        }
        Some(other) => bail!("{key} must be [re, im], got {other}"),
    }
}

pub fn moebius_input(v: &Value) -> anyhow::Result<MoebiusElement> {
    let gaussian = FieldDescriptor::gaussian();
    let get = |key: &str| -> anyhow::Result<FieldElement> {
        let e = v
            .get(key)
            .ok_or_else(|| anyhow!("moebius element missing entry {key:?}"))?;
        Ok(qjson::field_element_in(e, &gaussian)?)
    };
    Ok(MoebiusElement::from_gaussian([
        get("a")?,
        get("b")?,
        get("c")?,
        get("d")?,
    ])?)
}
