use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{Conjunct, LabelSet, PathExpr, Ucqt, Var};

/// Target SQL engine. Only the view preamble differs between dialects.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dialect {
    Postgres,
    Sqlite,
    Mysql,
}

impl std::str::FromStr for Dialect {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "postgres" | "postgresql" => Ok(Dialect::Postgres),
            "sqlite" => Ok(Dialect::Sqlite),
            "mysql" => Ok(Dialect::Mysql),
            other => Err(format!("unknown SQL dialect `{other}`")),
        }
    }
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dialect::Postgres => "postgres",
            Dialect::Sqlite => "sqlite",
            Dialect::Mysql => "mysql",
        })
    }
}

/// `alias.column`, or a bare column when `table` is `None`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Col {
    pub table: Option<String>,
    pub column: &'static str,
}

impl Col {
    fn of(alias: &str, column: &'static str) -> Col {
        Col {
            table: Some(alias.to_string()),
            column,
        }
    }

    fn bare(column: &'static str) -> Col {
        Col { table: None, column }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Col(Col),
    Null,
    One,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cond {
    Eq(Col, Col),
    Exists(Box<Select>),
    False,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    Table(String),
    Sub(Box<Query>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Item {
    pub source: Source,
    pub alias: Option<String>,
    pub on: Vec<Cond>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Select {
    pub distinct: bool,
    pub cols: Vec<(Value, Option<String>)>,
    pub from: Vec<Item>,
    pub filter: Vec<Cond>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Query {
    Select(Select),
    Union(Vec<Query>),
}

/// A recursive common table expression with columns `(Sr, Tr)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cte {
    pub name: String,
    pub query: Query,
}

/// The relational plan behind the emitted SQL text. Edge label `l` is a
/// table `l(Sr, Tr)`, node label `L` a table `L(Sr, ...)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SqlPlan {
    pub ctes: Vec<Cte>,
    pub body: Query,
    pub head: Vec<String>,
}

struct Compiler {
    ctes: Vec<Cte>,
    cte_of: BTreeMap<PathExpr, String>,
    edges: usize,
    nodes: usize,
}

fn node_source(labels: &LabelSet) -> Source {
    let part = |l: &crate::model::NodeLabel| {
        Query::Select(Select {
            distinct: false,
            cols: vec![(Value::Col(Col::bare("Sr")), None)],
            from: vec![Item {
                source: Source::Table(l.to_string()),
                alias: None,
                on: vec![],
            }],
            filter: vec![],
        })
    };
    let mut parts: Vec<Query> = labels.iter().map(part).collect();
    let q = if parts.len() == 1 {
        parts.pop().expect("one part")
    } else {
        Query::Union(parts)
    };
    Source::Sub(Box::new(q))
}

impl Compiler {
    fn edge_alias(&mut self) -> String {
        self.edges += 1;
        format!("e{}", self.edges)
    }

    fn node_alias(&mut self) -> String {
        self.nodes += 1;
        format!("n{}", self.nodes)
    }

    /// A source relation for `e` and the names of its source and target
    /// columns.
    fn source(&mut self, e: &PathExpr) -> (Source, &'static str, &'static str) {
        match e {
            PathExpr::Label(l) => (Source::Table(l.to_string()), "Sr", "Tr"),
            PathExpr::Reverse(l) => (Source::Table(l.to_string()), "Tr", "Sr"),
            PathExpr::Plus(inner) => (Source::Table(self.closure(e, inner)), "Sr", "Tr"),
            PathExpr::Repeat(..) => self.source(&e.desugar()),
            _ => (Source::Sub(Box::new(self.relation(e))), "Sr", "Tr"),
        }
    }

    fn closure(&mut self, whole: &PathExpr, inner: &PathExpr) -> String {
        if let Some(name) = self.cte_of.get(whole) {
            return name.clone();
        }
        let (base_src, s, t) = self.source(inner);
        let name = format!("tc_{}", self.ctes.len() + 1);
        let bare = matches!(base_src, Source::Table(_)) && s == "Sr";
        let base = if bare {
            Select {
                distinct: false,
                cols: vec![
                    (Value::Col(Col::bare("Sr")), None),
                    (Value::Col(Col::bare("Tr")), None),
                ],
                from: vec![Item {
                    source: base_src.clone(),
                    alias: None,
                    on: vec![],
                }],
                filter: vec![],
            }
        } else {
            Select {
                distinct: false,
                cols: vec![
                    (Value::Col(Col::of("st", s)), Some("Sr".into())),
                    (Value::Col(Col::of("st", t)), Some("Tr".into())),
                ],
                from: vec![Item {
                    source: base_src.clone(),
                    alias: Some("st".into()),
                    on: vec![],
                }],
                filter: vec![],
            }
        };
        let step = Select {
            distinct: false,
            cols: vec![
                (Value::Col(Col::of(&name, "Sr")), None),
                (Value::Col(Col::of("st", t)), None),
            ],
            from: vec![
                Item {
                    source: Source::Table(name.clone()),
                    alias: None,
                    on: vec![],
                },
                Item {
                    source: base_src,
                    alias: Some("st".into()),
                    on: vec![Cond::Eq(Col::of(&name, "Tr"), Col::of("st", s))],
                },
            ],
            filter: vec![],
        };
        self.ctes.push(Cte {
            name: name.clone(),
            query: Query::Union(vec![Query::Select(base), Query::Select(step)]),
        });
        self.cte_of.insert(whole.clone(), name.clone());
        name
    }

    /// Appends the joins for a concatenation chain and returns the columns
    /// holding its first source and last target. The first item's `on`
    /// list is left empty for the caller.
    fn chain(&mut self, e: &PathExpr, items: &mut Vec<Item>) -> (Col, Col) {
        let (steps, junctions) = e.chain();
        let mut start = None;
        let mut prev_end: Option<Col> = None;
        for (i, step) in steps.iter().enumerate() {
            let alias = self.edge_alias();
            let filter = if i > 0 {
                junctions[i - 1].labels.clone()
            } else {
                None
            };
            let (source, s, t) = match filter {
                None => self.source(step),
                Some(labels) => {
                    let inner = self.edge_alias();
                    let node = self.node_alias();
                    let (src, s, t) = self.source(step);
                    let sub = Select {
                        distinct: false,
                        cols: vec![
                            (Value::Col(Col::of(&inner, s)), Some("Sr".into())),
                            (Value::Col(Col::of(&inner, t)), Some("Tr".into())),
                        ],
                        from: vec![
                            Item {
                                source: node_source(&labels),
                                alias: Some(node.clone()),
                                on: vec![],
                            },
                            Item {
                                source: src,
                                alias: Some(inner.clone()),
                                on: vec![Cond::Eq(Col::of(&inner, s), Col::of(&node, "Sr"))],
                            },
                        ],
                        filter: vec![],
                    };
                    (Source::Sub(Box::new(Query::Select(sub))), "Sr", "Tr")
                }
            };
            let on = match prev_end.take() {
                Some(p) => vec![Cond::Eq(p, Col::of(&alias, s))],
                None => vec![],
            };
            if start.is_none() {
                start = Some(Col::of(&alias, s));
            }
            prev_end = Some(Col::of(&alias, t));
            items.push(Item {
                source,
                alias: Some(alias),
                on,
            });
        }
        (
            start.expect("chains are non-empty"),
            prev_end.expect("chains are non-empty"),
        )
    }

    /// A query with columns `(Sr, Tr)` computing `e`.
    fn relation(&mut self, e: &PathExpr) -> Query {
        let pair = |s: Col, t: Col| {
            vec![
                (Value::Col(s), Some("Sr".into())),
                (Value::Col(t), Some("Tr".into())),
            ]
        };
        match e {
            PathExpr::Union(a, b) => {
                let mut parts = Vec::new();
                for side in [a, b] {
                    match self.relation(side) {
                        Query::Union(ps) => parts.extend(ps),
                        q => parts.push(q),
                    }
                }
                Query::Union(parts)
            }
            PathExpr::Conj(a, b) => {
                let (x, y) = (self.edge_alias(), self.edge_alias());
                let (sa, s1, t1) = self.source(a);
                let (sb, s2, t2) = self.source(b);
                Query::Select(Select {
                    distinct: false,
                    cols: pair(Col::of(&x, s1), Col::of(&x, t1)),
                    from: vec![
                        Item {
                            source: sa,
                            alias: Some(x.clone()),
                            on: vec![],
                        },
                        Item {
                            source: sb,
                            alias: Some(y.clone()),
                            on: vec![
                                Cond::Eq(Col::of(&x, s1), Col::of(&y, s2)),
                                Cond::Eq(Col::of(&x, t1), Col::of(&y, t2)),
                            ],
                        },
                    ],
                    filter: vec![],
                })
            }
            PathExpr::BranchR(main, test) | PathExpr::BranchL(test, main) => {
                let right = matches!(e, PathExpr::BranchR(..));
                let (x, y) = (self.edge_alias(), self.edge_alias());
                let (sm, s1, t1) = self.source(main);
                let (st, s2, _) = self.source(test);
                let anchor = if right { Col::of(&x, t1) } else { Col::of(&x, s1) };
                let exists = Select {
                    distinct: false,
                    cols: vec![(Value::One, None)],
                    from: vec![Item {
                        source: st,
                        alias: Some(y.clone()),
                        on: vec![],
                    }],
                    filter: vec![Cond::Eq(Col::of(&y, s2), anchor)],
                };
                Query::Select(Select {
                    distinct: false,
                    cols: pair(Col::of(&x, s1), Col::of(&x, t1)),
                    from: vec![Item {
                        source: sm,
                        alias: Some(x),
                        on: vec![],
                    }],
                    filter: vec![Cond::Exists(Box::new(exists))],
                })
            }
            PathExpr::Repeat(..) => self.relation(&e.desugar()),
            PathExpr::Concat(..) | PathExpr::AnnConcat(..) => {
                let mut items = Vec::new();
                let (s, t) = self.chain(e, &mut items);
                Query::Select(Select {
                    distinct: false,
                    cols: pair(s, t),
                    from: items,
                    filter: vec![],
                })
            }
            PathExpr::Label(_) | PathExpr::Reverse(_) | PathExpr::Plus(_) => {
                let (src, s, t) = self.source(e);
                let cols = if s == "Sr" {
                    vec![
                        (Value::Col(Col::bare("Sr")), None),
                        (Value::Col(Col::bare("Tr")), None),
                    ]
                } else {
                    vec![
                        (Value::Col(Col::bare(s)), Some("Sr".into())),
                        (Value::Col(Col::bare(t)), Some("Tr".into())),
                    ]
                };
                Query::Select(Select {
                    distinct: false,
                    cols,
                    from: vec![Item {
                        source: src,
                        alias: None,
                        on: vec![],
                    }],
                    filter: vec![],
                })
            }
        }
    }

    fn conjunct(&mut self, c: &Conjunct, head: &[Var]) -> Select {
        let mut items: Vec<Item> = Vec::new();
        let mut bound: BTreeMap<Var, Col> = BTreeMap::new();
        for r in &c.relations {
            let first = items.len();
            let (s, t) = self.chain(&r.expr, &mut items);
            match bound.get(&r.src) {
                Some(col) => items[first].on.insert(0, Cond::Eq(col.clone(), s)),
                None => {
                    bound.insert(r.src.clone(), s);
                }
            }
            match bound.get(&r.trg) {
                Some(col) => {
                    let last = items.len() - 1;
                    items[last].on.push(Cond::Eq(col.clone(), t));
                }
                None => {
                    bound.insert(r.trg.clone(), t);
                }
            }
        }
        for l in &c.labels {
            let alias = self.node_alias();
            let own = Col::of(&alias, "Sr");
            let on = match bound.get(&l.var) {
                Some(col) => vec![Cond::Eq(own, col.clone())],
                None => {
                    bound.insert(l.var.clone(), own);
                    vec![]
                }
            };
            items.push(Item {
                source: node_source(&l.labels),
                alias: Some(alias),
                on,
            });
        }
        let filter = items
            .first_mut()
            .map(|i| std::mem::take(&mut i.on))
            .unwrap_or_default();
        let cols = if head.is_empty() {
            vec![(Value::One, Some("sat".into()))]
        } else {
            head.iter()
                .map(|v| (Value::Col(bound[v].clone()), Some(v.to_string())))
                .collect()
        };
        Select {
            distinct: true,
            cols,
            from: items,
            filter,
        }
    }
}

/// Builds the relational plan for `query`: one `SELECT DISTINCT` per
/// disjunct, closures as recursive CTEs named `tc_1`, `tc_2`, ...
pub fn sql_plan(query: &Ucqt) -> SqlPlan {
    let mut cx = Compiler {
        ctes: Vec::new(),
        cte_of: BTreeMap::new(),
        edges: 0,
        nodes: 0,
    };
    let head: Vec<String> = if query.head().is_empty() {
        vec!["sat".to_string()]
    } else {
        query.head().iter().map(ToString::to_string).collect()
    };
    let mut parts: Vec<Query> = query
        .disjuncts()
        .iter()
        .map(|d| Query::Select(cx.conjunct(d, query.head())))
        .collect();
    let body = match parts.len() {
        0 => Query::Select(Select {
            distinct: false,
            cols: head.iter().map(|h| (Value::Null, Some(h.clone()))).collect(),
            from: vec![],
            filter: vec![Cond::False],
        }),
        1 => parts.pop().expect("one part"),
        _ => Query::Union(parts),
    };
    SqlPlan {
        ctes: cx.ctes,
        body,
        head,
    }
}

fn render_col(c: &Col) -> String {
    match &c.table {
        Some(t) => format!("{t}.{}", c.column),
        None => c.column.to_string(),
    }
}

fn render_value(v: &Value, alias: &Option<String>) -> String {
    let text = match v {
        Value::Col(c) => render_col(c),
        Value::Null => "NULL".into(),
        Value::One => "1".into(),
    };
    match alias {
        Some(a) if !matches!(v, Value::Col(c) if c.table.is_none() && c.column == a) => {
            format!("{text} AS {a}")
        }
        _ => text,
    }
}

/// Accumulates output lines; bracketed blocks are indented to line up with
/// their opening parenthesis.
struct Out {
    lines: Vec<String>,
}

impl Out {
    fn new(first: impl Into<String>) -> Self {
        Out {
            lines: vec![first.into()],
        }
    }

    fn push(&mut self, s: &str) {
        self.lines.last_mut().expect("non-empty").push_str(s);
    }

    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    fn bracket(&mut self, inner: Vec<String>) {
        let col = self.lines.last().expect("non-empty").chars().count();
        if inner.len() == 1 {
            self.push(&format!("({})", inner[0]));
            return;
        }
        self.push("(");
        self.push(&inner[0]);
        for l in &inner[1..] {
            self.line(format!("{}{l}", " ".repeat(col + 1)));
        }
        self.line(format!("{})", " ".repeat(col)));
    }
}

fn nested(s: &Select) -> bool {
    s.from.iter().any(|i| matches!(i.source, Source::Sub(_)))
        || s.filter
            .iter()
            .chain(s.from.iter().flat_map(|i| &i.on))
            .any(|c| matches!(c, Cond::Exists(_)))
}

fn render_conds(out: &mut Out, conds: &[Cond]) {
    for (i, c) in conds.iter().enumerate() {
        if i > 0 {
            out.push(" AND ");
        }
        match c {
            Cond::Eq(a, b) => out.push(&format!("{}={}", render_col(a), render_col(b))),
            Cond::False => out.push("1=0"),
            Cond::Exists(s) => {
                out.push("EXISTS ");
                out.bracket(render_select(s, false));
            }
        }
    }
}

fn render_source(out: &mut Out, item: &Item) {
    match &item.source {
        Source::Table(t) => out.push(t),
        Source::Sub(q) => out.bracket(render_query(q, false)),
    }
    if let Some(a) = &item.alias {
        out.push(&format!(" AS {a}"));
    }
}

fn render_select(s: &Select, top: bool) -> Vec<String> {
    let cols: Vec<String> = s.cols.iter().map(|(v, a)| render_value(v, a)).collect();
    let mut out = Out::new(format!(
        "SELECT {}{}",
        if s.distinct { "DISTINCT " } else { "" },
        cols.join(", ")
    ));
    let one_line = !top && !nested(s);
    for (i, item) in s.from.iter().enumerate() {
        let kw = match (i, item.on.is_empty()) {
            (0, _) => "FROM ",
            (_, true) => "CROSS JOIN ",
            (_, false) => "JOIN ",
        };
        if one_line {
            out.push(&format!(" {kw}"));
        } else {
            out.line(format!("  {kw}"));
        }
        render_source(&mut out, item);
        if !item.on.is_empty() {
            out.push(" ON ");
            render_conds(&mut out, &item.on);
        }
    }
    if !s.filter.is_empty() {
        if one_line || s.from.is_empty() {
            out.push(" WHERE ");
        } else {
            out.line("  WHERE ");
        }
        render_conds(&mut out, &s.filter);
    }
    out.lines
}

fn render_query(q: &Query, top: bool) -> Vec<String> {
    match q {
        Query::Select(s) => render_select(s, top),
        Query::Union(parts) => {
            let rendered: Vec<Vec<String>> = parts.iter().map(|p| render_query(p, top)).collect();
            if !top && rendered.iter().all(|r| r.len() == 1) {
                let flat: Vec<&str> = rendered.iter().map(|r| r[0].as_str()).collect();
                return vec![flat.join(" UNION ")];
            }
            let mut lines = Vec::new();
            for (i, r) in rendered.into_iter().enumerate() {
                if i > 0 {
                    lines.push("UNION".to_string());
                }
                lines.extend(r);
            }
            lines
        }
    }
}

/// Renders a plan as SQL text. With `as_view` the query is wrapped in the
/// dialect's view statement, named `query_result`.
pub fn render_sql(plan: &SqlPlan, dialect: Dialect, as_view: bool) -> String {
    let mut lines = Vec::new();
    if as_view {
        let cols = plan.head.join(", ");
        lines.push(match dialect {
            Dialect::Postgres => format!("CREATE TEMPORARY VIEW query_result ({cols}) AS"),
            Dialect::Sqlite => format!("CREATE VIEW query_result ({cols}) AS"),
            Dialect::Mysql => format!("CREATE OR REPLACE VIEW query_result ({cols}) AS"),
        });
    }
    if !plan.ctes.is_empty() {
        lines.push("WITH RECURSIVE".to_string());
        let n = plan.ctes.len();
        for (i, cte) in plan.ctes.iter().enumerate() {
            let mut out = Out::new(format!("  {}(Sr, Tr) AS ", cte.name));
            out.bracket(render_query(&cte.query, false));
            if i + 1 < n {
                out.push(",");
            }
            lines.extend(out.lines);
        }
    }
    lines.extend(render_query(&plan.body, true));
    let mut text = lines.join("\n");
    text.push_str(";\n");
    text
}

/// Recursive SQL for `query` over the relational encoding of the graph:
/// one table per edge label with columns `Sr`, `Tr` and one table per node
/// label keyed by `Sr`.
pub fn emit_sql(query: &Ucqt, dialect: Dialect, as_view: bool) -> String {
    render_sql(&sql_plan(query), dialect, as_view)
}
