// Copyright 2026 The fvcontrol Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Text format for elections.
//!
//! ```text
//! # comment
//! candidates: a b c d
//! 3 * a c | b d
//! 2 * b d c |
//! d a c
//! ```
//!
//! Each ballot line lists the approved candidates from most to least
//! preferred, optionally prefixed by `<multiplicity> *`. Anything after `|`
//! names the disapproved candidates and is ignored on input.

use crate::election::{Ballot, CandidateId, Election};
use crate::error::{Error, Result};

const HEADER: &str = "candidates:";

/// Parses an election file.
pub fn parse_election(text: &str) -> Result<Election> {
    let mut lines = content_lines(text);
    let (header_line, header) = lines
        .next()
        .ok_or_else(|| parse_error(text.lines().count().max(1), "missing `candidates:` header"))?;
    let names = header
        .strip_prefix(HEADER)
        .ok_or_else(|| parse_error(header_line, "expected `candidates:` header"))?;
    let ids = names
        .split_whitespace()
        .map(CandidateId::new)
        .collect::<Result<Vec<_>>>()
        .map_err(|e| parse_error(header_line, e))?;
    if ids.is_empty() {
        return Err(parse_error(header_line, "no candidates declared"));
    }
    let shell = Election::new(ids, Vec::new()).map_err(|e| parse_error(header_line, e))?;
    let mut ballots = Vec::new();
    for (line, content) in lines {
        ballots.push(parse_ballot(&shell, content).map_err(|e| match e {
            Error::Parse { .. } => e,
            other => parse_error(line, other),
        })?);
    }
    Election::new(shell.candidates().to_vec(), ballots)
        .map_err(|e| Error::Internal(format!("parsed ballots rejected: {e}")))
}

/// Parses ballot lines of `text` against the candidates of `election`,
/// requiring the file's header to declare only candidates of `election`.
pub fn parse_pool(text: &str, election: &Election) -> Result<Vec<Ballot>> {
    let pool = parse_election(text)?;
    let mapping = pool
        .candidates()
        .iter()
        .map(|id| election.index_of(id.as_str()))
        .collect::<Result<Vec<_>>>()?;
    Ok(pool
        .ballots()
        .iter()
        .map(|b| {
            Ballot::new(
                b.ranking().iter().map(|&c| mapping[c]).collect(),
                b.multiplicity(),
            )
        })
        .collect())
}

/// Candidates declared in the header of `text`, resolved against `election`.
pub fn parse_candidate_list(text: &str, election: &Election) -> Result<Vec<usize>> {
    let listed = parse_election(text)?;
    listed
        .candidates()
        .iter()
        .map(|id| election.index_of(id.as_str()))
        .collect()
}

/// Canonical text form; parsing it gives back an equal election.
pub fn write_election(e: &Election) -> String {
    let mut out = String::from(HEADER);
    for id in e.candidates() {
        out.push(' ');
        out.push_str(id.as_str());
    }
    out.push('\n');
    for b in e.ballots() {
        out.push_str(&write_ballot(e, b));
        out.push('\n');
    }
    out
}

/// One ballot line, `<mult> * <approved> | <disapproved>`.
pub fn write_ballot(e: &Election, b: &Ballot) -> String {
    let mut tokens = vec![b.multiplicity().to_string(), "*".to_string()];
    tokens.extend(b.ranking().iter().map(|&c| e.name(c).to_string()));
    tokens.push("|".to_string());
    tokens.extend(
        (0..e.num_candidates())
            .filter(|&c| !b.approves(c))
            .map(|c| e.name(c).to_string()),
    );
    tokens.join(" ")
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let content = raw.split('#').next().unwrap_or("").trim();
        (!content.is_empty()).then_some((i + 1, content))
    })
}

fn parse_ballot(shell: &Election, content: &str) -> Result<Ballot> {
    let approved = content.split('|').next().unwrap_or("");
    let tokens: Vec<&str> = approved.split_whitespace().collect();
    let (multiplicity, names) = match tokens.as_slice() {
        [count, "*", rest @ ..] => {
            let m: u32 = count
                .parse()
                .map_err(|_| Error::InvalidBallot(format!("malformed multiplicity `{count}`")))?;
            (m, rest)
        }
        ["*", ..] => {
            return Err(Error::InvalidBallot("malformed multiplicity".into()))
        }
        rest => (1, rest),
    };
    if names.contains(&"*") {
        return Err(Error::InvalidBallot("unexpected `*`".into()));
    }
    shell.ballot_from_names(names, multiplicity)
}

fn parse_error(line: usize, message: impl ToString) -> Error {
    Error::Parse {
        line,
        message: message.to_string(),
    }
}
