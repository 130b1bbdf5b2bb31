use std::collections::{BTreeMap, BTreeSet};

use super::sql::{Col, Cond, Item, Query, Select, Source, SqlPlan, Value};
use crate::eval::Tuples;
use crate::model::GraphDb;

type Rows = BTreeSet<Vec<usize>>;

struct Table {
    columns: Vec<&'static str>,
    rows: Rows,
}

/// One bound row of a `FROM` item.
struct Frame<'a> {
    name: &'a str,
    columns: &'a [&'static str],
    row: &'a [usize],
}

struct Interp<'db> {
    db: &'db GraphDb,
    ctes: BTreeMap<String, Rows>,
}

const NULL: usize = usize::MAX;

fn lookup(frames: &[Frame<'_>], col: &Col) -> usize {
    let hit = frames.iter().rev().find_map(|f| {
        let name_ok = match &col.table {
            Some(t) => f.name == t,
            None => true,
        };
        let pos = f.columns.iter().position(|c| *c == col.column)?;
        name_ok.then(|| f.row[pos])
    });
    hit.unwrap_or_else(|| panic!("unresolved column {:?}", col))
}

impl Interp<'_> {
    fn table(&self, name: &str) -> Table {
        if let Some(rows) = self.ctes.get(name) {
            return Table {
                columns: vec!["Sr", "Tr"],
                rows: rows.clone(),
            };
        }
        let edges: Rows = self
            .db
            .edges()
            .iter()
            .filter(|e| e.label.as_str() == name)
            .map(|e| vec![e.src, e.trg])
            .collect();
        if !edges.is_empty() {
            return Table {
                columns: vec!["Sr", "Tr"],
                rows: edges,
            };
        }
        let nodes = (0..self.db.len())
            .filter(|&n| self.db.label_of(n).as_str() == name)
            .map(|n| vec![n])
            .collect();
        Table {
            columns: vec!["Sr"],
            rows: nodes,
        }
    }

    fn source(&self, s: &Source, outer: &[Frame<'_>]) -> Table {
        match s {
            Source::Table(t) => self.table(t),
            Source::Sub(q) => Table {
                columns: vec!["Sr", "Tr"],
                rows: self.query(q, outer),
            },
        }
    }

    fn holds(&self, conds: &[Cond], frames: &[Frame<'_>]) -> bool {
        conds.iter().all(|c| match c {
            Cond::Eq(a, b) => lookup(frames, a) == lookup(frames, b),
            Cond::False => false,
            Cond::Exists(s) => !self.select(s, frames).is_empty(),
        })
    }

    fn query(&self, q: &Query, outer: &[Frame<'_>]) -> Rows {
        match q {
            Query::Select(s) => self.select(s, outer),
            Query::Union(parts) => parts.iter().flat_map(|p| self.query(p, outer)).collect(),
        }
    }

    fn select(&self, s: &Select, outer: &[Frame<'_>]) -> Rows {
        let tables: Vec<Table> = s.from.iter().map(|i| self.source(&i.source, outer)).collect();
        let mut out = Rows::new();
        let mut frames: Vec<Frame<'_>> = outer
            .iter()
            .map(|f| Frame {
                name: f.name,
                columns: f.columns,
                row: f.row,
            })
            .collect();
        self.join(s, &s.from, &tables, &mut frames, &mut out);
        out
    }

    fn join<'a>(
        &self,
        s: &Select,
        items: &'a [Item],
        tables: &'a [Table],
        frames: &mut Vec<Frame<'a>>,
        out: &mut Rows,
    ) {
        let Some((item, rest)) = items.split_first() else {
            if self.holds(&s.filter, frames) {
                let row = s
                    .cols
                    .iter()
                    .map(|(v, _)| match v {
                        Value::Col(c) => lookup(frames, c),
                        Value::Null => NULL,
                        Value::One => 1,
                    })
                    .collect();
                out.insert(row);
            }
            return;
        };
        let table = &tables[0];
        let name = match (&item.alias, &item.source) {
            (Some(a), _) => a.as_str(),
            (None, Source::Table(t)) => t.as_str(),
            (None, Source::Sub(_)) => "",
        };
        for row in &table.rows {
            frames.push(Frame {
                name,
                columns: &table.columns,
                row,
            });
            if self.holds(&item.on, frames) {
                self.join(s, rest, &tables[1..], frames, out);
            }
            frames.pop();
        }
    }
}

/// Runs a plan over the relational encoding of `db` and returns the head
/// tuples, as node indices. Recursive CTEs are iterated to their fixpoint.
pub fn run_plan(plan: &SqlPlan, db: &GraphDb) -> Tuples {
    let mut it = Interp {
        db,
        ctes: BTreeMap::new(),
    };
    for cte in &plan.ctes {
        it.ctes.insert(cte.name.clone(), Rows::new());
        loop {
            let next = it.query(&cte.query, &[]);
            if next == it.ctes[&cte.name] {
                break;
            }
            it.ctes.insert(cte.name.clone(), next);
        }
    }
    it.query(&plan.body, &[])
        .into_iter()
        .filter(|r| !r.contains(&NULL))
        .collect()
}
