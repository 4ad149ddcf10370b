//! Exact linear algebra: dense fraction-free elimination and Smith normal
//! form over Z, sparse elimination over Q and prime fields, field contexts
//! for extension fields, and truncated p-adic matrix log/exp.

pub mod dense;
pub mod field;
pub mod padic_mat;
pub mod sparse;

pub use dense::{det, rank_fp, rank_q, smith_normal_form, FpMatrix, IntMatrix};
pub use field::{dense_rank, ExtCtx, FieldCtx, FpCtx, QCtx};
pub use padic_mat::{padic_exp, padic_log, PAdicMatrix};
pub use sparse::{rank_fp_sparse, rank_q_sparse, sparse_rank, SparseIntMatrix};
