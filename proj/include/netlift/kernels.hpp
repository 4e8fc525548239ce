#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace netlift::kern {

// Interval ("pair") constraints on the dual field: for every column and every
// layer block [l1, l2], the block sum hs*sum(phi_x) is bounded in norm by
// bound[k] with k = l2-l1+1. Shared by the sweep and the violation scan.
struct PairScheme {
  int p = 0;        // layer cells; layers are 0..p
  double hs = 0.0;
  std::vector<double> bound;    // bound[k], k = 1..p+1 (index 0 unused)
  std::vector<std::uint8_t> active;  // active[k], dyadic schemes disable some k
  std::vector<int> offset;      // offset[l1] = first correction slot of row l1
  int total_pairs = 0;

  void build(int p_, double hs_, bool dyadic,
             bool urban, double eps, double a);
};

// One Dykstra pass over all pair families (sorted by (l1, l2)), lazily
// applying the per-block corrections via suffix sums. corr holds one 2-vector
// per (pair, column): corr[slot*2*C + comp*C + col]. scratch_d needs
// (p+1)*2*C doubles, scratch_s 4*C doubles. Returns the largest per-block
// correction change of the pass (zero exactly at the Dykstra fixed point).
using PairSweepFn = double (*)(double* phi_x1, double* phi_x2, double* corr,
                               const PairScheme& tab, int C,
                               double* scratch_d, double* scratch_s);

// Max excess of any pair constraint on the current iterate; returns early
// with the running maximum once it exceeds bail_above (pass +inf for a full
// scan). scratch_prefix needs (p+2)*2*C doubles.
using PairViolationFn = double (*)(const double* phi_x1, const double* phi_x2,
                                   const PairScheme& tab, int C,
                                   double* scratch_prefix, double bail_above);

struct KernelOps {
  const char* name = "";

  // v <- clamp01(v - tau*adj) on free nodes, frozen data on fixed nodes;
  // returns max |change|.
  double (*primal_step)(double* v, const double* adj, const double* frozen,
                        const std::uint8_t* fixed, double tau, std::size_t n);

  // vbar = v + theta*(v - v_prev)
  void (*extrapolate)(double* vbar, const double* v, const double* v_prev,
                      double theta, std::size_t n);

  // phi[i] += c*(v[i+stride] - v[i]) for i in [begin, end)
  void (*ascent_strided)(double* phi, const double* v, double c,
                         std::ptrdiff_t stride, std::size_t begin, std::size_t end);
  // row-wise variant for unit stride: rows of length rowlen, first rowlen-1
  // entries of each row updated
  void (*ascent_rows)(double* phi, const double* v, double c, int rowlen,
                      std::size_t nrows);

  // adjoint accumulation: out[i] += c*(phi[i-stride] - phi[i])
  void (*adj_gather)(double* out, const double* phi, double c,
                     std::ptrdiff_t stride, std::size_t begin, std::size_t end);
  // out[i] += -c*phi[i]
  void (*adj_head)(double* out, const double* phi, double c,
                   std::size_t begin, std::size_t end);
  // out[i] += c*phi[i-stride]
  void (*adj_tail)(double* out, const double* phi, double c,
                   std::ptrdiff_t stride, std::size_t begin, std::size_t end);
  // unit-stride adjoint with per-row boundary handling
  void (*adj_rows)(double* out, const double* phi, double c, int rowlen,
                   std::size_t nrows);

  // Dykstra step for {phi_s >= 0}; returns the largest entry change
  double (*nonneg_dykstra)(double* phi, double* corr, std::size_t n);
  // Dykstra step for the pointwise ball |phi_x| <= radius
  double (*ball_dykstra)(double* x1, double* x2, double* c1, double* c2,
                         double radius, std::size_t n);

  double (*max_neg)(const double* a, std::size_t n);  // max(0, -a[i])
  double (*max_ball_excess)(const double* x1, const double* x2, double radius,
                            std::size_t n);
  double (*max_abs_diff)(const double* a, const double* b, std::size_t n);

  PairSweepFn pair_sweep;
  PairViolationFn pair_violation;
};

enum class KernelVariant { Auto, ScalarRef, ScalarOpt, Avx2 };

KernelVariant parse_kernel_variant(const std::string& name);  // "auto" | "scalar" | "opt" | "avx2"
std::string kernel_variant_name(KernelVariant v);

// Resolves Auto to the best variant supported by this CPU. Throws
// invalid_parameter when an unsupported variant is requested explicitly.
const KernelOps& get_kernels(KernelVariant v);

// Every variant that can run on this machine (for equivalence tests).
std::vector<const KernelOps*> available_kernels();

bool avx2_supported();

extern const KernelOps kScalarRef;
extern const KernelOps kScalarOpt;

}  // namespace netlift::kern
