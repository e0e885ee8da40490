//! Queens-completion encoding: board constants, attack and add-queen rules,
//! row/column cover, independence rules, game relations and board reading.

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraState, ConstantId, ElementRef, Relation};
use crate::error::{Error, Result};
use crate::trainer::ModelSnapshot;

/// Board square, zero-based: `file` is the column (a..), `rank` the row (1..).
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Square {
    pub file: usize,
    pub rank: usize,
}

impl Square {
    pub fn attacks(&self, other: &Square) -> bool {
        if self == other {
            return false;
        }
        self.file == other.file
            || self.rank == other.rank
            || self.file.abs_diff(other.file) == self.rank.abs_diff(other.rank)
    }

    /// Algebraic name like `b4`.
    pub fn name(&self) -> String {
        format!("{}{}", (b'a' + self.file as u8) as char, self.rank + 1)
    }

    pub fn parse(text: &str, size: usize) -> Result<Square> {
        let mut chars = text.chars();
        let file_ch = chars
            .next()
            .ok_or_else(|| Error::InvalidBoardConfig(format!("bad square {text:?}")))?;
        let file = (file_ch as i32) - ('a' as i32);
        let rank: i32 = chars
            .as_str()
            .parse::<i32>()
            .map_err(|_| Error::InvalidBoardConfig(format!("bad square {text:?}")))?
            - 1;
        if file < 0 || rank < 0 || file as usize >= size || rank as usize >= size {
            return Err(Error::InvalidBoardConfig(format!(
                "square {text:?} off a {size}x{size} board"
            )));
        }
        Ok(Square {
            file: file as usize,
            rank: rank as usize,
        })
    }
}

/// An N-blocked M×M completion instance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoardSpec {
    pub size: usize,
    pub blocked: Vec<Square>,
}

impl BoardSpec {
    pub fn validate(&self) -> Result<()> {
        for q in &self.blocked {
            if q.file >= self.size || q.rank >= self.size {
                return Err(Error::InvalidBoardConfig(format!(
                    "blocked queen {} off the board",
                    q.name()
                )));
            }
        }
        for (i, a) in self.blocked.iter().enumerate() {
            for b in &self.blocked[i + 1..] {
                if a == b || a.attacks(b) {
                    return Err(Error::InvalidBoardConfig(format!(
                        "blocked queens {} and {} attack each other",
                        a.name(),
                        b.name()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Constant table for one board size: Q/E per square, R per row, C per
/// column, the attack context U and the solution constant S.
#[derive(Clone, Debug)]
pub struct QueensWorld {
    pub size: usize,
    queen: Vec<ConstantId>,
    empty: Vec<ConstantId>,
    row: Vec<ConstantId>,
    col: Vec<ConstantId>,
    pub context: ConstantId,
    pub solution: ConstantId,
}

impl QueensWorld {
    pub fn register(state: &mut AlgebraState, size: usize) -> Result<QueensWorld> {
        let mut queen = Vec::new();
        let mut empty = Vec::new();
        for rank in 0..size {
            for file in 0..size {
                let sq = Square { file, rank };
                let ElementRef::Constant(q) = state.add_constant(&format!("Q_{}", sq.name()))?
                else {
                    unreachable!()
                };
                queen.push(q);
            }
        }
        for rank in 0..size {
            for file in 0..size {
                let sq = Square { file, rank };
                let ElementRef::Constant(e) = state.add_constant(&format!("E_{}", sq.name()))?
                else {
                    unreachable!()
                };
                empty.push(e);
            }
        }
        let mut row = Vec::new();
        for rank in 0..size {
            let ElementRef::Constant(r) = state.add_constant(&format!("R_{}", rank + 1))? else {
                unreachable!()
            };
            row.push(r);
        }
        let mut col = Vec::new();
        for file in 0..size {
            let ElementRef::Constant(c) =
                state.add_constant(&format!("C_{}", (b'a' + file as u8) as char))?
            else {
                unreachable!()
            };
            col.push(c);
        }
        let ElementRef::Constant(context) = state.add_constant("U")? else {
            unreachable!()
        };
        let ElementRef::Constant(solution) = state.add_constant("S")? else {
            unreachable!()
        };
        Ok(QueensWorld {
            size,
            queen,
            empty,
            row,
            col,
            context,
            solution,
        })
    }

    pub fn queen_at(&self, sq: Square) -> ConstantId {
        self.queen[sq.rank * self.size + sq.file]
    }

    pub fn empty_at(&self, sq: Square) -> ConstantId {
        self.empty[sq.rank * self.size + sq.file]
    }

    fn squares(&self) -> Vec<Square> {
        let mut out = Vec::with_capacity(self.size * self.size);
        for rank in 0..self.size {
            for file in 0..self.size {
                out.push(Square { file, rank });
            }
        }
        out
    }

    pub fn attacked_squares(&self, from: Square) -> Vec<Square> {
        self.squares().into_iter().filter(|s| from.attacks(s)).collect()
    }

    /// The rule set: attack rules, add-queen rules, R/C definitions and
    /// independence rules. Enforced every epoch, game or no game.
    pub fn rule_relations(&self, state: &mut AlgebraState) -> Result<Vec<Relation>> {
        let mut rels = Vec::new();
        let squares = self.squares();
        let all_q: Vec<ConstantId> = squares.iter().map(|&s| self.queen_at(s)).collect();
        let all_e: Vec<ConstantId> = squares.iter().map(|&s| self.empty_at(s)).collect();

        // Attack rule: a queen in context implies empty attacked squares.
        for &sq in &squares {
            let ctx = state.define_term(&[self.context, self.queen_at(sq)])?;
            for target in self.attacked_squares(sq) {
                rels.push(Relation::positive(self.empty_at(target), ctx));
            }
        }

        // Add-queen rule: a column (row) of empties missing one square
        // completes, in context, to a queen there.
        for &sq in &squares {
            let mut col_comps = vec![self.context];
            for rank in 0..self.size {
                if rank != sq.rank {
                    col_comps.push(self.empty_at(Square { file: sq.file, rank }));
                }
            }
            let col_term = state.define_term(&col_comps)?;
            rels.push(Relation::positive(self.queen_at(sq), col_term));

            let mut row_comps = vec![self.context];
            for file in 0..self.size {
                if file != sq.file {
                    row_comps.push(self.empty_at(Square { file, rank: sq.rank }));
                }
            }
            let row_term = state.define_term(&row_comps)?;
            rels.push(Relation::positive(self.queen_at(sq), row_term));
        }

        // R_x ⊙ C_y < Q_xy.
        for &sq in &squares {
            let lhs = state.define_term(&[self.row[sq.rank], self.col[sq.file]])?;
            rels.push(Relation::positive(lhs, self.queen_at(sq)));
        }

        // Independence of board squares: no queen or empty is implied by
        // the merge of all the others.
        for &sq in &squares {
            let mut comps: Vec<ConstantId> = all_q
                .iter()
                .copied()
                .filter(|&q| q != self.queen_at(sq))
                .collect();
            comps.extend(all_e.iter().copied());
            let t = state.define_term(&comps)?;
            rels.push(Relation::negative(self.queen_at(sq), t));

            let mut comps: Vec<ConstantId> = all_e
                .iter()
                .copied()
                .filter(|&e| e != self.empty_at(sq))
                .collect();
            comps.extend(all_q.iter().copied());
            let t = state.define_term(&comps)?;
            rels.push(Relation::negative(self.empty_at(sq), t));
        }

        // Independence of R_x and C_y.
        for rank in 0..self.size {
            let mut comps: Vec<ConstantId> = self
                .squares()
                .iter()
                .filter(|s| s.rank != rank)
                .map(|&s| self.queen_at(s))
                .collect();
            comps.extend(all_e.iter().copied());
            let t = state.define_term(&comps)?;
            rels.push(Relation::negative(self.row[rank], t));
        }
        for file in 0..self.size {
            let mut comps: Vec<ConstantId> = self
                .squares()
                .iter()
                .filter(|s| s.file != file)
                .map(|&s| self.queen_at(s))
                .collect();
            comps.extend(all_e.iter().copied());
            let t = state.define_term(&comps)?;
            rels.push(Relation::negative(self.col[file], t));
        }

        // Contextual independence: U never conjures a square state.
        for &sq in &squares {
            let ue = state.define_term(&[self.context, self.empty_at(sq)])?;
            rels.push(Relation::negative(self.queen_at(sq), ue));
            let uq = state.define_term(&[self.context, self.queen_at(sq)])?;
            rels.push(Relation::negative(self.empty_at(sq), uq));
        }
        let mut rc = vec![self.context];
        rc.extend(self.row.iter().copied());
        rc.extend(self.col.iter().copied());
        let rc_term = state.define_term(&rc)?;
        for &sq in &squares {
            rels.push(Relation::negative(self.queen_at(sq), rc_term));
            rels.push(Relation::negative(self.empty_at(sq), rc_term));
        }

        Ok(rels)
    }

    /// Relations describing one completion game for `spec`.
    pub fn game_relations(&self, state: &mut AlgebraState, spec: &BoardSpec) -> Result<Vec<Relation>> {
        spec.validate()?;
        if spec.size != self.size {
            return Err(Error::InvalidBoardConfig(format!(
                "spec is {0}x{0} but the world is {1}x{1}",
                spec.size, self.size
            )));
        }
        let mut rels = Vec::new();
        // Blocked queens are part of the solution.
        if !spec.blocked.is_empty() {
            let comps: Vec<ConstantId> = spec.blocked.iter().map(|&q| self.queen_at(q)).collect();
            let lhs = if comps.len() == 1 {
                ElementRef::Constant(comps[0])
            } else {
                state.define_term(&comps)?
            };
            rels.push(Relation {
                sign: crate::algebra::Sign::Positive,
                lhs,
                rhs: ElementRef::Constant(self.solution),
            });
        }
        // The solution lies inside the merge of all square constants.
        let mut all: Vec<ConstantId> = Vec::new();
        for &sq in &self.squares() {
            all.push(self.empty_at(sq));
            all.push(self.queen_at(sq));
        }
        let board = state.define_term(&all)?;
        rels.push(Relation::positive(self.solution, board));
        // No square is both empty and occupied.
        for &sq in &self.squares() {
            let both = state.define_term(&[self.empty_at(sq), self.queen_at(sq)])?;
            let us = state.define_term(&[self.context, self.solution])?;
            rels.push(Relation {
                sign: crate::algebra::Sign::Negative,
                lhs: both,
                rhs: us,
            });
        }
        // Every row and column holds a queen.
        for rank in 0..self.size {
            rels.push(Relation::positive(self.row[rank], self.solution));
        }
        for file in 0..self.size {
            rels.push(Relation::positive(self.col[file], self.solution));
        }
        Ok(rels)
    }
}

/// The full relation set of one completion instance: rule set plus game
/// relations, quantifiers expanded to ground relations.
pub fn encode_queens(
    world: &QueensWorld,
    state: &mut AlgebraState,
    spec: &BoardSpec,
) -> Result<Vec<Relation>> {
    let mut rels = world.rule_relations(state)?;
    rels.extend(world.game_relations(state, spec)?);
    Ok(rels)
}

/// Per-square verdict when querying a snapshot.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum SquareState {
    Queen,
    Empty,
    Unknown,
    /// Both `Q < S` and `E < S` hold; surfaced, not hidden.
    Conflict,
}

/// Queries the snapshot at every square: Queen if `Q_xy < S`, Empty if
/// `E_xy < S`, Unknown when neither holds. A solution constant without any
/// atoms decides nothing (vacuous containment is not knowledge), so an
/// untrained snapshot reads as all Unknown.
pub fn read_board(snapshot: &ModelSnapshot, spec: &BoardSpec) -> Result<Vec<Vec<SquareState>>> {
    let size = spec.size;
    let s = snapshot
        .constant_index("S")
        .ok_or_else(|| Error::UnknownConstant("S".into()))?;
    let mut grid = vec![vec![SquareState::Unknown; size]; size];
    if !snapshot
        .atoms
        .iter()
        .any(|fp| fp.binary_search(&s).is_ok())
    {
        return Ok(grid);
    }
    for rank in 0..size {
        for file in 0..size {
            let sq = Square { file, rank };
            let q = snapshot
                .constant_index(&format!("Q_{}", sq.name()))
                .ok_or_else(|| Error::UnknownConstant(format!("Q_{}", sq.name())))?;
            let e = snapshot
                .constant_index(&format!("E_{}", sq.name()))
                .ok_or_else(|| Error::UnknownConstant(format!("E_{}", sq.name())))?;
            let has_q = snapshot.leq_constants(q, s);
            let has_e = snapshot.leq_constants(e, s);
            grid[rank][file] = match (has_q, has_e) {
                (true, true) => SquareState::Conflict,
                (true, false) => SquareState::Queen,
                (false, true) => SquareState::Empty,
                (false, false) => SquareState::Unknown,
            };
        }
    }
    Ok(grid)
}

/// True iff the fully decided grid holds exactly `size` pairwise
/// non-attacking queens.
pub fn validate_board(grid: &[Vec<SquareState>]) -> Result<bool> {
    let size = grid.len();
    let mut queens = Vec::new();
    for (rank, row) in grid.iter().enumerate() {
        for (file, &cell) in row.iter().enumerate() {
            match cell {
                SquareState::Queen => queens.push(Square { file, rank }),
                SquareState::Empty => {}
                SquareState::Unknown | SquareState::Conflict => {
                    return Err(Error::UndecidedSquares)
                }
            }
        }
    }
    if queens.len() != size {
        return Ok(false);
    }
    for (i, a) in queens.iter().enumerate() {
        for b in &queens[i + 1..] {
            if a.attacks(b) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// ASCII rendering: `Q` queen, `.` empty, `?` unknown, `!` conflict. Rank
/// `size` printed first, files a.. left to right.
pub fn render_board(grid: &[Vec<SquareState>]) -> String {
    let mut out = String::new();
    for rank in (0..grid.len()).rev() {
        for cell in &grid[rank] {
            out.push(match cell {
                SquareState::Queen => 'Q',
                SquareState::Empty => '.',
                SquareState::Unknown => '?',
                SquareState::Conflict => '!',
            });
            out.push(' ');
        }
        out.pop();
        out.push('\n');
    }
    out
}
