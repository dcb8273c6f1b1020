//! FCIDUMP (Molpro convention) reader and writer.

use std::fmt::Write as _;

use super::MOIntegrals;
use crate::error::{Error, Result};

/// Namelist fields of an FCIDUMP header. Point-group labels are kept but unused.
#[derive(Clone, Debug, PartialEq)]
pub struct FcidumpHeader {
    pub norb: usize,
    pub nelec: usize,
    pub ms2: i32,
    pub orbsym: Vec<i64>,
    pub isym: i64,
}

fn parse_fortran_f64(tok: &str) -> Option<f64> {
    let t = tok.replace(['D', 'd'], "E");
    t.parse::<f64>().ok()
}

fn header_int(key: &str, val: &str) -> Result<i64> {
    val.trim()
        .parse::<i64>()
        .map_err(|_| Error::Header(format!("field {key} has non-integer value {val:?}")))
}

fn parse_header(text: &str) -> Result<FcidumpHeader> {
    // Flatten "KEY=v1,v2,KEY2=..." into (key, values) pairs.
    let body = text.trim();
    let body = body
        .strip_prefix('&')
        .ok_or_else(|| Error::Header("missing leading &FCI".into()))?;
    let body = body.trim_start();
    if body.len() < 3 || !body[..3].eq_ignore_ascii_case("FCI") {
        return Err(Error::Header("namelist is not &FCI".into()));
    }
    let body = &body[3..];
    let mut fields: Vec<(String, Vec<String>)> = Vec::new();
    for raw in body.split(',') {
        let tok = raw.trim();
        if tok.is_empty() {
            continue;
        }
        if let Some((k, v)) = tok.split_once('=') {
            fields.push((k.trim().to_ascii_uppercase(), vec![v.trim().to_string()]));
        } else if let Some(last) = fields.last_mut() {
            last.1.push(tok.to_string());
        } else {
            return Err(Error::Header(format!("unexpected token {tok:?}")));
        }
    }
    let find = |key: &str| fields.iter().find(|(k, _)| k == key).map(|(_, v)| v);
    let norb = find("NORB").ok_or_else(|| Error::Header("field NORB missing".into()))?;
    let norb = header_int("NORB", &norb[0])?;
    if norb <= 0 {
        return Err(Error::Header(format!("field NORB must be positive, got {norb}")));
    }
    let nelec = find("NELEC").ok_or_else(|| Error::Header("field NELEC missing".into()))?;
    let nelec = header_int("NELEC", &nelec[0])?;
    if nelec < 0 {
        return Err(Error::Header(format!("field NELEC must be non-negative, got {nelec}")));
    }
    let ms2 = match find("MS2") {
        Some(v) => header_int("MS2", &v[0])? as i32,
        None => 0,
    };
    let orbsym = match find("ORBSYM") {
        Some(v) => v
            .iter()
            .filter(|s| !s.is_empty())
            .map(|s| header_int("ORBSYM", s))
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    let isym = match find("ISYM") {
        Some(v) => header_int("ISYM", &v[0])?,
        None => 1,
    };
    Ok(FcidumpHeader { norb: norb as usize, nelec: nelec as usize, ms2, orbsym, isym })
}

/// Parse an FCIDUMP document into symmetrized integrals plus its header.
pub fn parse_fcidump(text: &str) -> Result<(MOIntegrals, FcidumpHeader)> {
    let mut header_text = String::new();
    let mut body_start = None;
    for (lineno, line) in text.lines().enumerate() {
        let l = line.trim();
        let upper = l.to_ascii_uppercase();
        let end_marker = upper == "/" || upper.ends_with("&END") || upper.ends_with('/');
        let content = if upper.ends_with("&END") {
            &l[..l.len() - 4]
        } else if end_marker {
            &l[..l.len() - 1]
        } else {
            l
        };
        header_text.push_str(content);
        header_text.push(',');
        if end_marker {
            body_start = Some(lineno + 1);
            break;
        }
    }
    let body_start = body_start.ok_or_else(|| Error::Header("missing &END terminator".into()))?;
    let header = parse_header(&header_text)?;
    let n = header.norb;
    let mut ints = MOIntegrals::zeros(n);

    for (lineno, line) in text.lines().enumerate().skip(body_start) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        let ln = lineno + 1;
        if toks.len() != 5 {
            return Err(Error::Parse { line: ln, msg: format!("expected 5 fields, found {}", toks.len()) });
        }
        let val = parse_fortran_f64(toks[0])
            .ok_or_else(|| Error::Parse { line: ln, msg: format!("non-numeric value {:?}", toks[0]) })?;
        let mut idx = [0usize; 4];
        for k in 0..4 {
            let i: i64 = toks[k + 1]
                .parse()
                .map_err(|_| Error::Parse { line: ln, msg: format!("non-integer index {:?}", toks[k + 1]) })?;
            if i < 0 || i as usize > n {
                return Err(Error::Bounds(format!("line {ln}: index {i} outside 0..={n}")));
            }
            idx[k] = i as usize;
        }
        let [i, j, k, l] = idx;
        match (i, j, k, l) {
            (0, 0, 0, 0) => ints.e_nuclear = val,
            (i, j, 0, 0) if i > 0 && j > 0 => ints.set_h(i - 1, j - 1, val),
            (i, j, k, l) if i > 0 && j > 0 && k > 0 && l > 0 => ints.set_g(i - 1, j - 1, k - 1, l - 1, val),
            // orbital energies (i 0 0 0) and other markers carry no Hamiltonian data
            (_, 0, 0, 0) => {}
            _ => {
                return Err(Error::Parse { line: ln, msg: format!("unsupported index pattern {i} {j} {k} {l}") });
            }
        }
    }
    Ok((ints, header))
}

/// Serialize integrals in FCIDUMP form with round-trip exact values.
pub fn write_fcidump(ints: &MOIntegrals, nelec: usize, ms2: i32) -> String {
    let n = ints.n_orbitals;
    let mut out = String::new();
    let _ = writeln!(out, " &FCI NORB={n},NELEC={nelec},MS2={ms2},");
    let _ = writeln!(out, "  ORBSYM={}", vec!["1"; n].join(","));
    let _ = writeln!(out, "  ISYM=1,");
    let _ = writeln!(out, " &END");
    for p in 0..n {
        for q in 0..=p {
            for r in 0..n {
                for s in 0..=r {
                    if p * (p + 1) / 2 + q < r * (r + 1) / 2 + s {
                        continue;
                    }
                    let v = ints.g(p, q, r, s);
                    if v != 0.0 {
                        let _ = writeln!(out, "{:>25.16E} {:>4} {:>4} {:>4} {:>4}", v, p + 1, q + 1, r + 1, s + 1);
                    }
                }
            }
        }
    }
    for p in 0..n {
        for q in 0..=p {
            let v = ints.h(p, q);
            if v != 0.0 {
                let _ = writeln!(out, "{:>25.16E} {:>4} {:>4} {:>4} {:>4}", v, p + 1, q + 1, 0, 0);
            }
        }
    }
    let _ = writeln!(out, "{:>25.16E} {:>4} {:>4} {:>4} {:>4}", ints.e_nuclear, 0, 0, 0, 0);
    out
}
