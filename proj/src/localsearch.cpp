#include "heataco/localsearch.hpp"

#include <algorithm>
#include <cassert>
#include <utility>

namespace heataco {

namespace {

// Accepted moves must gain more than this fraction of the current length;
// keeps float noise from cycling on near-ties.
constexpr double kRelativeGain = 1e-12;

struct TourView {
  std::vector<int>& perm;
  std::vector<int>& pos;
  int n;

  int succ(int node) const { return perm[(pos[node] + 1) % n]; }
  int pred(int node) const { return perm[(pos[node] + n - 1) % n]; }

  // Reverse the cyclic run of positions [from..to] (inclusive, forward
  // direction, may wrap).
  void reverse_positions(int from, int to) {
    int count = ((to - from + n) % n + 1) / 2;
    int i = from, j = to;
    while (count-- > 0) {
      std::swap(perm[i], perm[j]);
      pos[perm[i]] = i;
      pos[perm[j]] = j;
      i = (i + 1) % n;
      j = (j + n - 1) % n;
    }
  }

  // 2-opt exchange: remove (a, succ a) and (c, succ c), add (a,c) and
  // (succ a, succ c). Reverses the shorter of the two arcs.
  void apply_two_opt(int a, int c) {
    const int pb = (pos[a] + 1) % n;
    const int pc = pos[c];
    const int inner = (pc - pb + n) % n + 1;
    if (inner * 2 <= n) {
      reverse_positions(pb, pc);
    } else {
      reverse_positions((pc + 1) % n, pos[a]);
    }
  }
};

class Improver {
 public:
  Improver(std::vector<int>& perm, double length, const DistanceMatrix& d,
           const CandidateLists& candidates, const LsParams& params, LsWorkspace& ws)
      : view_{perm, ws.pos, int(perm.size())},
        d_(d),
        cand_(candidates),
        params_(params),
        ws_(ws),
        length_(length) {
    ws_.pos.resize(view_.n);
    for (int p = 0; p < view_.n; ++p) ws_.pos[perm[p]] = p;
    ws_.dont_look.assign(view_.n, 0);
  }

  double length() const { return length_; }

  // One full descent; returns true if any move was accepted.
  bool run_two_opt() {
    std::fill(ws_.dont_look.begin(), ws_.dont_look.end(), 0);
    bool any = false;
    for (int pass = 0; pass < params_.max_passes_2opt; ++pass) {
      bool pass_improved = false;
      for (int a = 0; a < view_.n; ++a) {
        if (ws_.dont_look[a]) continue;
        if (improve_node_2opt(a)) {
          pass_improved = true;
          any = true;
        } else {
          ws_.dont_look[a] = 1;
        }
      }
      if (!pass_improved) break;
    }
    return any;
  }

  // Sweeps trying 2-opt moves first, then 3-opt reconnections, per node.
  // A node goes to sleep only when neither neighborhood improves it.
  void run_combined(int max_passes) {
    std::fill(ws_.dont_look.begin(), ws_.dont_look.end(), 0);
    for (int pass = 0; pass < max_passes; ++pass) {
      bool pass_improved = false;
      for (int a = 0; a < view_.n; ++a) {
        if (ws_.dont_look[a]) continue;
        bool improved = improve_node_2opt(a);
        improved = improve_node_3opt(a) || improved;
        if (improved) {
          pass_improved = true;
        } else {
          ws_.dont_look[a] = 1;
        }
      }
      if (!pass_improved) break;
    }
  }

 private:
  double gain_threshold() const { return kRelativeGain * length_; }

  void wake(std::initializer_list<int> nodes) {
    for (int v : nodes) ws_.dont_look[v] = 0;
  }

  // Scans both tour edges of `a` against a's candidates; applies per the
  // configured strategy. Returns true if the tour changed.
  bool improve_node_2opt(int a) {
    bool improved_here = false;
    for (;;) {
      int best_c = -1;
      bool best_succ_form = true;
      double best_gain = gain_threshold();

      const int b = view_.succ(a);
      const int pa = view_.pred(a);
      const double d_ab = d_(a, b);
      const double d_pa = d_(pa, a);
      for (const int c : cand_.neighbors(a)) {
        const double d_ac = d_(a, c);
        // succ form: remove (a,b),(c,succ c); add (a,c),(b,succ c)
        if (c != a && c != b) {
          const int dn = view_.succ(c);
          if (dn != a) {
            const double gain = d_ab + d_(c, dn) - d_ac - d_(b, dn);
            if (gain > best_gain) {
              best_gain = gain;
              best_c = c;
              best_succ_form = true;
              if (params_.strategy == MoveStrategy::FirstImprovement) break;
            }
          }
        }
        // pred form: remove (pred a,a),(pred c,c); add (a,c),(pred a,pred c)
        if (c != a && c != pa) {
          const int pc = view_.pred(c);
          if (pc != a) {
            const double gain = d_pa + d_(pc, c) - d_ac - d_(pa, pc);
            if (gain > best_gain) {
              best_gain = gain;
              best_c = c;
              best_succ_form = false;
              if (params_.strategy == MoveStrategy::FirstImprovement) break;
            }
          }
        }
      }

      if (best_c < 0) return improved_here;
      if (best_succ_form) {
        const int dn = view_.succ(best_c);
        view_.apply_two_opt(a, best_c);
        wake({a, b, best_c, dn});
      } else {
        const int pc = view_.pred(best_c);
        view_.apply_two_opt(pa, pc);
        wake({a, pa, best_c, pc});
      }
      length_ -= best_gain;
      improved_here = true;
    }
  }

  struct ThreeOptMove {
    double gain = 0.0;
    int r2 = 0, r3 = 0;  // cut offsets relative to the base position
    int type = 0;        // reconnection type, see apply_three_opt
  };

  // Pure 3-opt reconnections driven by candidate pairs: the edge added at
  // `a` comes from cand(a) and the edge added at succ(a) from cand(succ a).
  // Segment frame: tour = a [S1: b..c] [S2: d..e] f..a with cuts after
  // positions p1, p1+r2, p1+r3.
  bool improve_node_3opt(int a) {
    bool improved_here = false;
    const int n = view_.n;
    for (;;) {
      const int p1 = ws_.pos[a];
      const int b = view_.succ(a);
      const double d_ab = d_(a, b);
      ThreeOptMove best;
      best.gain = gain_threshold();

      for (const int u : cand_.neighbors(a)) {
        if (u == a || u == b) continue;
        const int ru = (ws_.pos[u] - p1 + n) % n;
        for (const int v : cand_.neighbors(b)) {
          if (v == a || v == b) continue;
          const int rv = (ws_.pos[v] - p1 + n) % n;

          // type 3: a [c..b] [e..d] f  adds (a,u=c),(b,v=e),(d,f)
          if (ru >= 1 && rv > ru && rv <= n - 1) {
            const int r2 = ru, r3 = rv;
            const int c = u, e = v;
            const int dn = view_.perm[(p1 + r2 + 1) % n];
            const int f = view_.perm[(p1 + r3 + 1) % n];
            const double gain = d_ab + d_(c, dn) + d_(e, f) -
                                (d_(a, c) + d_(b, e) + d_(dn, f));
            consider(best, gain, r2, r3, 3);
          }
          // type 4: a [d..e] [b..c] f  adds (a,u=d),(b,v=e),(c,f)
          {
            const int r2 = (ru + n - 1) % n;
            const int r3 = rv;
            if (r2 >= 1 && r3 > r2 && r3 <= n - 1) {
              const int dn = u, e = v;
              const int c = view_.perm[(p1 + r2) % n];
              const int f = view_.perm[(p1 + r3 + 1) % n];
              const double gain = d_ab + d_(c, dn) + d_(e, f) -
                                  (d_(a, dn) + d_(e, b) + d_(c, f));
              consider(best, gain, r2, r3, 4);
            }
          }
          // type 5: a [d..e] [c..b] f  adds (a,u=d),(b,v=f),(e,c)
          {
            const int r2 = (ru + n - 1) % n;
            const int r3 = (rv + n - 1) % n;
            if (r2 >= 1 && r3 > r2 && r3 <= n - 1) {
              const int dn = u, f = v;
              const int c = view_.perm[(p1 + r2) % n];
              const int e = view_.perm[(p1 + r3) % n];
              const double gain = d_ab + d_(c, dn) + d_(e, f) -
                                  (d_(a, dn) + d_(e, c) + d_(b, f));
              consider(best, gain, r2, r3, 5);
            }
          }
          // type 6: a [e..d] [b..c] f  adds (a,u=e),(b,v=d),(c,f)
          {
            const int r2 = (rv + n - 1) % n;
            const int r3 = ru;
            if (r2 >= 1 && r3 > r2 && r3 <= n - 1) {
              const int e = u, dn = v;
              const int c = view_.perm[(p1 + r2) % n];
              const int f = view_.perm[(p1 + r3 + 1) % n];
              const double gain = d_ab + d_(c, dn) + d_(e, f) -
                                  (d_(a, e) + d_(dn, b) + d_(c, f));
              consider(best, gain, r2, r3, 6);
            }
          }
        }
        if (params_.strategy == MoveStrategy::FirstImprovement && best.type != 0) break;
      }

      if (best.type == 0) return improved_here;
      apply_three_opt(a, best);
      length_ -= best.gain;
      improved_here = true;
    }
  }

  void consider(ThreeOptMove& best, double gain, int r2, int r3, int type) const {
    if (gain > best.gain) best = {gain, r2, r3, type};
  }

  void apply_three_opt(int a, const ThreeOptMove& m) {
    const int n = view_.n;
    const int p1 = ws_.pos[a];
    const int s1_from = (p1 + 1) % n;
    const int s1_to = (p1 + m.r2) % n;
    const int s2_from = (p1 + m.r2 + 1) % n;
    const int s2_to = (p1 + m.r3) % n;

    const int b = view_.perm[s1_from];
    const int c = view_.perm[s1_to];
    const int dn = view_.perm[s2_from];
    const int e = view_.perm[s2_to];
    const int f = view_.perm[(p1 + m.r3 + 1) % n];

    switch (m.type) {
      case 3:  // reverse both segments in place
        view_.reverse_positions(s1_from, s1_to);
        view_.reverse_positions(s2_from, s2_to);
        break;
      case 4:  // swap segments, original orientations
        view_.reverse_positions(s1_from, s1_to);
        view_.reverse_positions(s2_from, s2_to);
        view_.reverse_positions(s1_from, s2_to);
        break;
      case 5:  // S2 then reversed S1
        view_.reverse_positions(s2_from, s2_to);
        view_.reverse_positions(s1_from, s2_to);
        break;
      case 6:  // reversed S2 then S1
        view_.reverse_positions(s1_from, s1_to);
        view_.reverse_positions(s1_from, s2_to);
        break;
      default:
        assert(false);
    }
    wake({a, b, c, dn, e, f});
  }

  TourView view_;
  const DistanceMatrix& d_;
  const CandidateLists& cand_;
  const LsParams& params_;
  LsWorkspace& ws_;
  double length_;
};

double recomputed_length(const std::vector<int>& perm, const DistanceMatrix& d) {
  double total = 0.0;
  const int n = int(perm.size());
  int prev = perm[n - 1];
  for (int t = 0; t < n; ++t) {
    total += d(prev, perm[t]);
    prev = perm[t];
  }
  return total;
}

}  // namespace

double two_opt_inplace(std::vector<int>& perm, double length, const DistanceMatrix& d,
                       const CandidateLists& candidates, const LsParams& params,
                       LsWorkspace& ws) {
  Improver improver(perm, length, d, candidates, params, ws);
  improver.run_two_opt();
  return recomputed_length(perm, d);
}

double three_opt_inplace(std::vector<int>& perm, double length, const DistanceMatrix& d,
                         const CandidateLists& candidates, const LsParams& params,
                         LsWorkspace& ws) {
  Improver improver(perm, length, d, candidates, params, ws);
  improver.run_two_opt();
  improver.run_combined(params.max_passes_3opt);
  return recomputed_length(perm, d);
}

Tour two_opt(const Tour& tour, const DistanceMatrix& d, const CandidateLists& candidates,
             const LsParams& params) {
  Tour out = tour;
  LsWorkspace ws;
  out.length = two_opt_inplace(out.perm, out.length, d, candidates, params, ws);
  return out;
}

Tour three_opt(const Tour& tour, const DistanceMatrix& d, const CandidateLists& candidates,
               const LsParams& params) {
  Tour out = tour;
  LsWorkspace ws;
  out.length = three_opt_inplace(out.perm, out.length, d, candidates, params, ws);
  return out;
}

}  // namespace heataco
