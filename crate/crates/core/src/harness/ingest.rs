//! Network and respondent files.
//!
//! Network input is a pair of whitespace-separated text files. The edge file
//! holds `u v` or `u v weight` per line; the attribute file holds `id group`
//! with group `A` or `B`. Lines starting with `#` are skipped. Ids are
//! arbitrary tokens, numbered densely in attribute-file order.
//!
//! Respondent files are CSV with the header
//! `respondent_id,wave,recruiter_id,group,reported_degree,reported_n_A,reported_n_B`;
//! seeds leave `recruiter_id` empty. Extra columns are ignored.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use crate::netcore::{Group, Network, NodeId};
use crate::rdssim::{RdsSample, Respondent};

use super::{read_file, HarnessError};

#[derive(Debug, Clone, PartialEq)]
pub struct IngestedNetwork {
    pub network: Network,
    /// External id of each dense node id.
    pub ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestedSample {
    pub sample: RdsSample,
    /// External respondent id of each row.
    pub ids: Vec<String>,
}

fn parse_err(source_name: &str, line: usize, message: impl Into<String>) -> HarnessError {
    HarnessError::Parse { source_name: source_name.to_string(), line, message: message.into() }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.trim();
        (!line.is_empty() && !line.starts_with('#')).then(|| (i + 1, line.split_whitespace().collect()))
    })
}

fn parse_group(token: &str) -> Option<Group> {
    token.parse().ok()
}

/// Parses in-memory edge and attribute text. `names` label the two sources
/// in error messages.
pub fn parse_network(edges: &str, attrs: &str, names: (&str, &str)) -> Result<IngestedNetwork, HarnessError> {
    let (edge_name, attr_name) = names;
    let mut ids = Vec::new();
    let mut index: HashMap<String, NodeId> = HashMap::new();
    let mut groups = Vec::new();
    for (line, tokens) in content_lines(attrs) {
        let [id, group] = tokens[..] else {
            return Err(parse_err(attr_name, line, format!("expected `id group`, found {} fields", tokens.len())));
        };
        let g =
            parse_group(group).ok_or_else(|| parse_err(attr_name, line, format!("group `{group}` is not A or B")))?;
        if index.insert(id.to_string(), ids.len()).is_some() {
            return Err(parse_err(attr_name, line, format!("node `{id}` listed twice")));
        }
        ids.push(id.to_string());
        groups.push(g);
    }
    if ids.is_empty() {
        return Err(HarnessError::Data(format!("{attr_name}: no nodes")));
    }

    let mut weighted = None;
    let mut seen = HashSet::new();
    let mut edge_list = Vec::new();
    for (line, tokens) in content_lines(edges) {
        if !(2..=3).contains(&tokens.len()) {
            return Err(parse_err(edge_name, line, format!("expected `u v [weight]`, found {} fields", tokens.len())));
        }
        let has_weight = tokens.len() == 3;
        if *weighted.get_or_insert(has_weight) != has_weight {
            return Err(parse_err(edge_name, line, "weight column present on some lines only"));
        }
        let node = |t: &str| {
            index
                .get(t)
                .copied()
                .ok_or_else(|| parse_err(edge_name, line, format!("node `{t}` missing from {attr_name}")))
        };
        let (u, v) = (node(tokens[0])?, node(tokens[1])?);
        if u == v {
            return Err(parse_err(edge_name, line, format!("self-loop on `{}`", tokens[0])));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(parse_err(edge_name, line, format!("duplicate edge {} {}", tokens[0], tokens[1])));
        }
        let w = if has_weight {
            let w: f64 = tokens[2]
                .parse()
                .map_err(|_| parse_err(edge_name, line, format!("weight `{}` is not a number", tokens[2])))?;
            if !(w.is_finite() && w > 0.0) {
                return Err(parse_err(edge_name, line, format!("weight {w} must be positive")));
            }
            w
        } else {
            1.0
        };
        edge_list.push((u, v, w));
    }

    let mut touched = vec![false; ids.len()];
    for &(u, v, _) in &edge_list {
        touched[u] = true;
        touched[v] = true;
    }
    if let Some(lonely) = touched.iter().position(|t| !t) {
        return Err(HarnessError::Data(format!("node `{}` in {attr_name} has no edges in {edge_name}", ids[lonely])));
    }

    let network = if weighted == Some(true) {
        Network::from_weighted_edges(groups, edge_list)?
    } else {
        Network::from_edges(groups, edge_list.into_iter().map(|(u, v, _)| (u, v)))?
    };
    Ok(IngestedNetwork { network, ids })
}

pub fn ingest_network(edge_path: &Path, attr_path: &Path) -> Result<IngestedNetwork, HarnessError> {
    let edges = read_file(edge_path)?;
    let attrs = read_file(attr_path)?;
    parse_network(&edges, &attrs, (&edge_path.display().to_string(), &attr_path.display().to_string()))
}

/// Edge and attribute text for a network; ids default to the dense node ids.
/// Weights are written in shortest round-trip form.
pub fn emit_network(net: &Network, ids: Option<&[String]>) -> (String, String) {
    let name = |i: NodeId| ids.map_or_else(|| i.to_string(), |ids| ids[i].clone());
    let mut edges = String::from(if net.is_weighted() { "# u v weight\n" } else { "# u v\n" });
    for (u, v) in net.edges() {
        match net.weight(u, v) {
            Some(w) if net.is_weighted() => edges.push_str(&format!("{} {} {}\n", name(u), name(v), w)),
            _ => edges.push_str(&format!("{} {}\n", name(u), name(v))),
        }
    }
    let mut attrs = String::from("# id group\n");
    for i in 0..net.node_count() {
        attrs.push_str(&format!("{} {}\n", name(i), net.group(i)));
    }
    (edges, attrs)
}

const RDS_COLUMNS: [&str; 7] =
    ["respondent_id", "wave", "recruiter_id", "group", "reported_degree", "reported_n_A", "reported_n_B"];

/// Parses respondent CSV text into a sample. True degree and group are set
/// to the reported values.
pub fn parse_rds_data(text: &str, name: &str) -> Result<IngestedSample, HarnessError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| parse_err(name, 1, e.to_string()))?.clone();
    let mut col = [0usize; 7];
    for (slot, want) in col.iter_mut().zip(RDS_COLUMNS) {
        *slot = headers.iter().position(|h| h == want).ok_or_else(|| {
            parse_err(name, 1, format!("missing column `{want}`; expected {}", RDS_COLUMNS.join(",")))
        })?;
    }

    let mut ids: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut sample = RdsSample { complete: true, ..Default::default() };
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(name, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let field = |k: usize| record.get(col[k]).unwrap_or("");
        let int = |k: usize| {
            field(k).parse::<usize>().map_err(|_| {
                parse_err(name, line, format!("{} `{}` is not a non-negative integer", RDS_COLUMNS[k], field(k)))
            })
        };

        let id = field(0).to_string();
        if id.is_empty() {
            return Err(parse_err(name, line, "empty respondent_id"));
        }
        if index.contains_key(&id) {
            return Err(parse_err(name, line, format!("respondent `{id}` listed twice")));
        }
        let wave = int(1)?;
        let recruiter_index =
            match field(2) {
                "" => None,
                r => Some(*index.get(r).ok_or_else(|| {
                    parse_err(name, line, format!("recruiter `{r}` does not appear on an earlier row"))
                })?),
            };
        match recruiter_index {
            None if wave != 0 => return Err(parse_err(name, line, format!("seed row has wave {wave}, expected 0"))),
            Some(p) if wave != sample.respondents[p].wave + 1 => {
                return Err(parse_err(
                    name,
                    line,
                    format!("wave {wave} does not follow recruiter wave {}", sample.respondents[p].wave),
                ))
            }
            _ => {}
        }
        let group = parse_group(field(3))
            .ok_or_else(|| parse_err(name, line, format!("group `{}` is not A or B", field(3))))?;
        let (degree, n_a, n_b) = (int(4)?, int(5)?, int(6)?);
        if degree == 0 {
            return Err(parse_err(name, line, "reported_degree must be at least 1"));
        }
        if n_a + n_b != degree {
            return Err(parse_err(
                name,
                line,
                format!("reported_n_A + reported_n_B = {} but reported_degree = {degree}", n_a + n_b),
            ));
        }

        let idx = sample.respondents.len();
        if let Some(p) = recruiter_index {
            sample.recruitment_edges.push((p, idx));
        }
        sample.respondents.push(Respondent {
            node_id: idx,
            wave,
            recruiter: recruiter_index,
            recruiter_index,
            true_group: group,
            true_degree: degree,
            reported_degree: degree,
            reported_n_a: n_a,
            reported_n_b: n_b,
            is_seed: recruiter_index.is_none(),
        });
        index.insert(id.clone(), idx);
        ids.push(id);
    }
    Ok(IngestedSample { sample, ids })
}

pub fn ingest_rds_data(path: &Path) -> Result<IngestedSample, HarnessError> {
    parse_rds_data(&read_file(path)?, &path.display().to_string())
}

/// Respondent CSV for a sample. Respondents are numbered by row; the
/// trailing `node_id` column keeps the network node.
pub fn emit_rds_data(sample: &RdsSample) -> String {
    let mut out = RDS_COLUMNS.join(",");
    out.push_str(",node_id\n");
    for (i, r) in sample.respondents.iter().enumerate() {
        let recruiter = r.recruiter_index.map(|p| p.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{i},{},{recruiter},{},{},{},{},{}\n",
            r.wave, r.true_group, r.reported_degree, r.reported_n_a, r.reported_n_b, r.node_id
        ));
    }
    out
}
