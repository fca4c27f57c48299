use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds::BoundsReport;
use crate::boxtree::{Address, BoxTree};
use crate::chain_graph::RecurrentModel;
use crate::error::{Error, Result};
use crate::maps::{MapKind, MapModel};

const MAGIC: &str = "boxchain-model";
const VERSION: u32 = 1;

/// A recurrent model on disk: map, sizes, boxes with component ids, optional edges.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SavedModel {
    pub version: u32,
    pub kind: MapKind,
    pub a: Option<String>,
    pub c: String,
    pub rprime: f64,
    /// Subdivision factor per axis.
    pub m: u32,
    pub delta: f64,
    pub epsilon: f64,
    pub epsilon_min: f64,
    pub bounds: Option<BoundsReport>,
    pub boxes: Vec<SavedBox>,
    pub edges: Vec<SavedEdge>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SavedBox {
    pub address: Address,
    pub component: u32,
}

/// An edge between box indices; `cross` marks edges joining different components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SavedEdge {
    pub from: u32,
    pub to: u32,
    pub cross: bool,
}

impl SavedModel {
    pub fn from_model(map: &MapModel, model: &RecurrentModel, bounds: Option<&BoundsReport>, edges: bool) -> Self {
        let g = &model.gamma;
        let boxes = g
            .addresses()
            .iter()
            .zip(&model.components)
            .map(|(&address, &component)| SavedBox { address, component })
            .collect();
        let mut saved_edges = Vec::new();
        if edges {
            let mut all: Vec<SavedEdge> = g.edges().map(|(from, to)| SavedEdge { from, to, cross: false }).collect();
            all.extend(model.cross_edges.iter().map(|&(from, to)| SavedEdge { from, to, cross: true }));
            all.sort_by_key(|e| (e.from, e.to));
            saved_edges = all;
        }
        let bounds = bounds.map(|b| BoundsReport { sinks: Vec::new(), ..b.clone() });
        SavedModel {
            version: VERSION,
            kind: map.kind(),
            a: map.a().map(|a| a.text().to_string()),
            c: map.c().text().to_string(),
            rprime: map.rprime(),
            m: 2,
            delta: g.delta,
            epsilon: g.epsilon,
            epsilon_min: g.epsilon_min,
            bounds,
            boxes,
            edges: saved_edges,
        }
    }

    pub fn map(&self) -> Result<MapModel> {
        MapModel::new(self.kind, self.a.as_deref(), &self.c, Some(self.rprime))
    }

    /// The tree whose live leaves are exactly the saved boxes.
    pub fn tree(&self, map: &MapModel) -> Result<BoxTree> {
        let addrs: Vec<Address> = self.boxes.iter().map(|b| b.address).collect();
        BoxTree::from_leaves(map, &addrs)
    }

    pub fn addresses(&self) -> Vec<Address> {
        self.boxes.iter().map(|b| b.address).collect()
    }

    pub fn components(&self) -> Vec<u32> {
        self.boxes.iter().map(|b| b.component).collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let naxes = self.kind.layout().naxes();
        let _ = write!(s, "{MAGIC} v{} kind={}", self.version, self.kind.as_str());
        if let Some(a) = &self.a {
            let _ = write!(s, " a={a}");
        }
        let _ = writeln!(
            s,
            " c={} rprime={:?} m={} delta={:?} epsilon={:?} epsilon_min={:?}",
            self.c, self.rprime, self.m, self.delta, self.epsilon, self.epsilon_min
        );
        match &self.bounds {
            Some(b) => {
                let _ = writeln!(
                    s,
                    "bounds epsilon={:?} delta={:?} r_prime={:?} a_mod={:?} r_coeff={:?} epsilon_prime={:?} \
                     delta_prime={:?} delta0_prime={:?} conservative={}",
                    b.epsilon,
                    b.delta,
                    b.r_prime,
                    b.a_mod,
                    b.r_coeff,
                    b.epsilon_prime,
                    b.delta_prime,
                    b.delta0_prime,
                    b.conservative
                );
            }
            None => s.push_str("bounds none\n"),
        }
        let _ = writeln!(s, "boxes {}", self.boxes.len());
        for b in &self.boxes {
            let _ = write!(s, "{}", b.address.depth);
            for k in 0..naxes {
                let _ = write!(s, " {}", b.address.idx[k]);
            }
            let _ = writeln!(s, " {}", b.component);
        }
        let _ = writeln!(s, "edges {}", self.edges.len());
        for e in &self.edges {
            let _ = writeln!(s, "{} {} {}", e.from, e.to, if e.cross { 'c' } else { 'g' });
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<SavedModel> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut next = |what: &str| lines.next().ok_or_else(|| Error::parse(0, format!("unexpected end of file: expected {what}")));

        let (ln, header) = next("header")?;
        let mut words = header.split_whitespace();
        if words.next() != Some(MAGIC) {
            return Err(Error::parse(ln, format!("expected '{MAGIC}'")));
        }
        let version = match words.next() {
            Some(v) if v == format!("v{VERSION}") => VERSION,
            other => return Err(Error::parse(ln, format!("unsupported version {other:?}"))),
        };
        let fields = kv_fields(ln, words)?;
        let get = |k: &str| field(ln, &fields, k);
        let kind: MapKind = get("kind")?.parse().map_err(|e: Error| Error::parse(ln, e.to_string()))?;
        let a = fields.iter().find(|(k, _)| k == "a").map(|(_, v)| v.clone());
        let c = get("c")?.to_string();
        let rprime = parse_f64(ln, "rprime", get("rprime")?)?;
        let m: u32 = get("m")?.parse().map_err(|_| Error::parse(ln, "bad m"))?;
        if m != 2 {
            return Err(Error::parse(ln, format!("unsupported subdivision factor {m}")));
        }
        let delta = parse_f64(ln, "delta", get("delta")?)?;
        let epsilon = parse_f64(ln, "epsilon", get("epsilon")?)?;
        let epsilon_min = parse_f64(ln, "epsilon_min", get("epsilon_min")?)?;

        let (ln, bline) = next("bounds line")?;
        let mut words = bline.split_whitespace();
        if words.next() != Some("bounds") {
            return Err(Error::parse(ln, "expected 'bounds'"));
        }
        let rest: Vec<&str> = words.collect();
        let bounds = if rest == ["none"] {
            None
        } else {
            let f = kv_fields(ln, rest.into_iter())?;
            let num = |k: &str| parse_f64(ln, k, field(ln, &f, k)?);
            Some(BoundsReport {
                epsilon: num("epsilon")?,
                delta: num("delta")?,
                r_prime: num("r_prime")?,
                a_mod: num("a_mod")?,
                r_coeff: num("r_coeff")?,
                epsilon_prime: num("epsilon_prime")?,
                delta_prime: num("delta_prime")?,
                delta0_prime: num("delta0_prime")?,
                conservative: field(ln, &f, "conservative")?
                    .parse()
                    .map_err(|_| Error::parse(ln, "bad conservative flag"))?,
                sinks: Vec::new(),
            })
        };

        let naxes = kind.layout().naxes();
        let (ln, bl) = next("boxes line")?;
        let nboxes = count_line(ln, bl, "boxes")?;
        let mut boxes = Vec::with_capacity(nboxes);
        for _ in 0..nboxes {
            let (ln, l) = next("box record")?;
            let nums: Vec<u32> = l
                .split_whitespace()
                .map(|w| w.parse::<u32>().map_err(|_| Error::parse(ln, format!("bad integer '{w}'"))))
                .collect::<Result<_>>()?;
            if nums.len() != naxes + 2 {
                return Err(Error::parse(ln, format!("box record needs {} fields, got {}", naxes + 2, nums.len())));
            }
            if nums[0] > 31 {
                return Err(Error::parse(ln, format!("depth {} too large", nums[0])));
            }
            let mut idx = [0u32; 4];
            idx[..naxes].copy_from_slice(&nums[1..=naxes]);
            boxes.push(SavedBox { address: Address { depth: nums[0] as u8, idx }, component: nums[naxes + 1] });
        }
        let (ln, el) = next("edges line")?;
        let nedges = count_line(ln, el, "edges")?;
        let mut edges = Vec::with_capacity(nedges);
        for _ in 0..nedges {
            let (ln, l) = next("edge record")?;
            let w: Vec<&str> = l.split_whitespace().collect();
            if w.len() != 3 {
                return Err(Error::parse(ln, "edge record needs 'from to g|c'"));
            }
            let idx = |s: &str| -> Result<u32> {
                let v: u32 = s.parse().map_err(|_| Error::parse(ln, format!("bad box index '{s}'")))?;
                if v as usize >= nboxes {
                    return Err(Error::parse(ln, format!("box index {v} out of range")));
                }
                Ok(v)
            };
            let cross = match w[2] {
                "g" => false,
                "c" => true,
                other => return Err(Error::parse(ln, format!("bad edge flag '{other}'"))),
            };
            edges.push(SavedEdge { from: idx(w[0])?, to: idx(w[1])?, cross });
        }
        if let Some((ln, extra)) = lines.find(|(_, l)| !l.trim().is_empty()) {
            return Err(Error::parse(ln, format!("trailing content '{extra}'")));
        }
        Ok(SavedModel { version, kind, a, c, rprime, m, delta, epsilon, epsilon_min, bounds, boxes, edges })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    pub fn parse_json(text: &str) -> Result<SavedModel> {
        serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))
    }

    pub fn save(&self, path: &Path, json: bool) -> Result<()> {
        let body = if json { self.to_json() } else { self.to_text() };
        std::fs::write(path, body)?;
        Ok(())
    }

    /// Reads either format; JSON is recognised by a leading `{`.
    pub fn load(path: &Path) -> Result<SavedModel> {
        let text = std::fs::read_to_string(path)?;
        if text.trim_start().starts_with('{') {
            SavedModel::parse_json(&text)
        } else {
            SavedModel::parse_text(&text)
        }
    }
}

fn kv_fields<'a>(ln: usize, words: impl Iterator<Item = &'a str>) -> Result<Vec<(String, String)>> {
    words
        .map(|w| {
            w.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| Error::parse(ln, format!("expected key=value, got '{w}'")))
        })
        .collect()
}

fn field<'a>(ln: usize, fields: &'a [(String, String)], key: &str) -> Result<&'a str> {
    fields
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| Error::parse(ln, format!("missing field '{key}'")))
}

fn parse_f64(ln: usize, key: &str, v: &str) -> Result<f64> {
    v.parse().map_err(|_| Error::parse(ln, format!("field '{key}': bad number '{v}'")))
}

fn count_line(ln: usize, line: &str, name: &str) -> Result<usize> {
    match line.split_whitespace().collect::<Vec<_>>().as_slice() {
        [w, n] if *w == name => n.parse().map_err(|_| Error::parse(ln, format!("bad {name} count '{n}'"))),
        _ => Err(Error::parse(ln, format!("expected '{name} <count>'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SavedModel {
        SavedModel {
            version: 1,
            kind: MapKind::QuadPoly,
            a: None,
            c: "-1".into(),
            rprime: 2.0,
            m: 2,
            delta: 1.25e-4,
            epsilon: 0.125,
            epsilon_min: 0.125,
            bounds: None,
            boxes: vec![
                SavedBox { address: Address { depth: 5, idx: [3, 4, 0, 0] }, component: 0 },
                SavedBox { address: Address { depth: 5, idx: [3, 5, 0, 0] }, component: 1 },
            ],
            edges: vec![SavedEdge { from: 0, to: 1, cross: true }, SavedEdge { from: 1, to: 1, cross: false }],
        }
    }

    #[test]
    fn text_round_trip() {
        let m = sample();
        let t = m.to_text();
        assert_eq!(SavedModel::parse_text(&t).unwrap(), m);
        assert_eq!(SavedModel::parse_text(&t).unwrap().to_text(), t);
    }

    #[test]
    fn json_round_trip() {
        let m = sample();
        assert_eq!(SavedModel::parse_json(&m.to_json()).unwrap(), m);
    }

    #[test]
    fn truncated_file_reports_line() {
        let t = sample().to_text();
        let cut: String = t.lines().take(4).map(|l| format!("{l}\n")).collect();
        assert!(matches!(SavedModel::parse_text(&cut), Err(Error::Parse { .. })));
        let bad = t.replacen("5 3 5 1", "5 3 x 1", 1);
        match SavedModel::parse_text(&bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
    }
}
