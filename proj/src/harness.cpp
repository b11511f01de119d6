#include "ssbft/harness.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ssbft/recycler.hpp"

namespace ssbft {

namespace {

struct Node {
  SsbftMvc mvc;
  SigIndex sig;
  ObjectArray objs;
  std::vector<bool> read;
  std::vector<bool> tainted;
};

std::unique_ptr<Node> make_node(NodeId id, const TrialConfig& cfg,
                                const std::shared_ptr<StubLedger>& ledger) {
  const Params& p = cfg.params;
  CoreFactory factory = [&](std::uint32_t slot) -> std::unique_ptr<AsyncCore> {
    if (cfg.core == CoreKind::kStub) return std::make_unique<DelayStubCore>(id, slot, ledger);
    return std::make_unique<MmrLiteCore>(id, p.n, p.t);
  };
  return std::unique_ptr<Node>(new Node{SsbftMvc(id, p.n, p.t, p.kappa),
                                        SigIndex(id, p.n, p.t, p.kappa, p.index_bound),
                                        ObjectArray(id, p.n, p.t, p.index_num, p.log_size, factory),
                                        std::vector<bool>(p.index_num, false),
                                        std::vector<bool>(p.index_num, false)});
}

std::string show(const MaybeValue& v) { return v ? std::to_string(*v) : "bot"; }

template <typename T>
std::string show_na(const std::optional<T>& v) {
  return v ? std::to_string(*v) : "NA";
}

bool all_equal_index(const RoundRecord& rec) {
  for (const auto& nr : rec.nodes) {
    if (nr.index_end != rec.nodes.front().index_end) return false;
  }
  return true;
}

bool starts_equal(const RoundRecord& rec) {
  for (const auto& nr : rec.nodes) {
    if (nr.index_start != rec.nodes.front().index_start) return false;
  }
  return true;
}

bool incremented(const RoundRecord& rec) {
  return std::any_of(rec.nodes.begin(), rec.nodes.end(),
                     [](const NodeRecord& nr) { return nr.index_end != nr.index_start; });
}

// Capture at phase-0 round c checked against the inputs sampled at c - kappa.
bool capture_legal(const Trace& trace, Round c) {
  const std::uint32_t kappa = trace.config.params.kappa;
  const auto& nodes = trace.rounds[c].nodes;
  if (c < kappa) {
    return std::all_of(nodes.begin(), nodes.end(), [](const NodeRecord& nr) { return !nr.mvc; });
  }
  const MaybeValue first = nodes.front().mvc;
  if (!first || *first > 1) return false;
  for (const auto& nr : nodes) {
    if (nr.mvc != first) return false;
  }
  const auto& sampled = trace.rounds[c - kappa].nodes;
  const auto v = sampled.front().input;
  const bool unanimous = std::all_of(sampled.begin(), sampled.end(),
                                     [&](const NodeRecord& nr) { return nr.input == v; });
  return !unanimous || !v || *first == *v;
}

bool round_legal(const Trace& trace, Round r, Legality scope) {
  const Params& p = trace.config.params;
  const auto& rec = trace.rounds[r];
  if (!all_equal_index(rec) || rec.nodes.front().index_end >= p.index_bound) return false;
  for (const auto& nr : rec.nodes) {
    // A slot is live at every correct node or at none.
    if (scope == Legality::kFull && nr.live != rec.nodes.front().live) return false;
    const Bit inc = (nr.mvc && *nr.mvc == 1) ? 1 : 0;
    const std::uint64_t expected =
        rec.phase == p.kappa - 1 ? (nr.index_start + inc) % p.index_bound : nr.index_start;
    if (nr.index_end != expected) return false;
  }
  return capture_legal(trace, r - rec.phase);
}

}  // namespace

void check_config(const TrialConfig& config) {
  auto v = params_validate(config.params);
  if (!v.ok()) {
    std::string msg = "invalid parameters:";
    for (const auto& x : v.violations) msg += " [" + x.rule + ": " + x.detail + "]";
    throw ParamError(msg);
  }
  if (config.rounds == 0) throw ParamError("invalid parameters: rounds must be positive");
  if (config.params.t >= config.params.n) throw ParamError("invalid parameters: no correct node");
}

Trace run_trial(const TrialConfig& config) {
  check_config(config);
  const Params& p = config.params;
  const std::uint64_t seed = p.seed;

  Trace trace;
  trace.config = config;

  const auto byz = choose_byzantine(p.n, p.t, derive_seed(seed, Stream::kByzSet));
  std::vector<bool> correct(p.n);
  for (NodeId i = 0; i < p.n; ++i) {
    correct[i] = !byz[i];
    if (byz[i]) trace.byzantine.push_back(i);
  }

  Adversary adversary(config.adversary, p, byz, derive_seed(seed, Stream::kAdversary));
  CoinOracle coin(seed);
  auto ledger = std::make_shared<StubLedger>(config.dmax, derive_seed(seed, Stream::kStubDelay));
  Rng workload(derive_seed(seed, Stream::kWorkload));
  Rng injector(derive_seed(seed, Stream::kInjector));
  Corruptor corruptor(derive_seed(seed, Stream::kInjector, 1));
  Network net(p.n);

  std::vector<std::unique_ptr<Node>> nodes(p.n);
  for (NodeId i = 0; i < p.n; ++i) {
    if (correct[i]) nodes[i] = make_node(i, config, ledger);
  }

  std::vector<RoundMail> mail = net.silent_mail();
  if (config.inject == InjectMode::kFull) {
    for (NodeId i = 0; i < p.n; ++i) {
      if (!nodes[i]) continue;
      corruptor.set_scope("node" + std::to_string(i));
      inject_full(nodes[i]->mvc, nodes[i]->sig, nodes[i]->objs, corruptor);
    }
    mail = net.initial_mail(random_initial_mail(injector, p));
    trace.corruption_log = corruptor.log();
  } else if (config.inject == InjectMode::kTargeted) {
    const std::uint64_t base = injector.uniform(0, p.index_bound - 1);
    std::uint64_t rank = 0;
    for (NodeId i = 0; i < p.n; ++i) {
      if (!nodes[i]) continue;
      const std::uint64_t index = (base + rank++) % p.index_bound;
      inject_targeted(nodes[i]->mvc, nodes[i]->sig, nodes[i]->objs, index);
    }
  }
  for (auto& node : nodes) {
    if (!node) continue;
    for (std::uint32_t s = 0; s < p.index_num; ++s) node->tainted[s] = !node->objs.at(s).is_fresh();
  }

  NodeId first_correct = 0;
  while (!correct[first_correct]) ++first_correct;

  trace.rounds.reserve(config.rounds);
  for (Round r = 0; r < config.rounds; ++r) {
    RoundRecord rec;
    rec.round = r;
    rec.phase = clock_read(r, p.kappa);

    // Per-receiver views of the mail, split by field.
    std::vector<std::vector<std::optional<CoField>>> co_in(p.n);
    std::vector<std::vector<std::optional<SigField>>> sig_in(p.n);
    std::vector<std::map<std::uint32_t, std::vector<std::optional<EstPayload>>>> est_in(p.n);
    for (NodeId j = 0; j < p.n; ++j) {
      co_in[j].resize(p.n);
      sig_in[j].resize(p.n);
      for (const auto& env : mail[j].inbox) {
        auto [est, co, sig] = demultiplex(env);
        co_in[j][env.sender()] = std::move(co);
        sig_in[j][env.sender()] = std::move(sig);
        if (!est) continue;
        for (const auto& e : est->entries) {
          auto& slot_in = est_in[j][e.slot];
          if (slot_in.empty()) slot_in.resize(p.n);
          slot_in[env.sender()] = e.payload;
        }
      }
    }

    std::vector<std::optional<SigField>> previews(p.n);
    for (NodeId i = 0; i < p.n; ++i) {
      if (nodes[i]) previews[i] = nodes[i]->sig.preview(rec.phase, sig_in[i]);
    }
    AdversaryView view{p, r, rec.phase, mail, previews};
    std::vector<std::optional<Outbox>> outboxes = adversary.outboxes(view);
    rec.order.push_back("adversary");

    rec.coin = coin.draw(r);
    rec.order.push_back("coin");

    std::vector<std::vector<bool>> read_before(p.n);
    for (NodeId i = 0; i < p.n; ++i) {
      if (nodes[i]) read_before[i] = nodes[i]->read;
    }

    for (NodeId i = 0; i < p.n; ++i) {
      if (!nodes[i]) continue;
      Node& node = *nodes[i];
      NodeRecord nr;
      nr.id = i;
      nr.index_start = node.sig.get_index();

      auto input = [&]() -> Value {
        const auto slot = static_cast<std::uint32_t>(node.sig.get_index() % p.index_num);
        nr.raw_delivered = node.objs.at(slot).was_delivered();
        // A captured 1 is already an increment in flight for the current object.
        const Value v = node.mvc.result() == MaybeValue{1} ? 0 : (nr.raw_delivered ? 1 : 0);
        nr.input = v;
        return v;
      };
      auto co_out = node.mvc.pulse(rec.phase, co_in[i], input);
      auto sig_out = node.sig.pulse(rec.phase, sig_in[i], node.mvc.result(), rec.coin);

      const std::uint64_t index = node.sig.get_index();
      nr.recycled = node.objs.recycler_pulse(index);
      for (auto s : nr.recycled) {
        bool any = false;
        bool all = true;
        for (NodeId k = 0; k < p.n; ++k) {
          if (!nodes[k]) continue;
          any = any || read_before[k][s];
          all = all && read_before[k][s];
        }
        if (any && !all) ++rec.unread_recycles;
        if (all && i == first_correct) ++rec.completed;
        node.read[s] = false;
      }

      const auto current = static_cast<std::uint32_t>(index % p.index_num);
      if (rec.phase == 0) node.objs.at(current).propose(workload.bit());

      const auto live = window(index, p.index_num, p.log_size);
      for (auto s : live) {
        if (!is_bottom(node.objs.at(s).result())) node.read[s] = true;
      }
      EstField est;
      const std::vector<std::optional<EstPayload>> none(p.n);
      const StepContext ctx{r, rec.coin};
      for (auto s : live) {
        auto& obj = node.objs.at(s);
        if (obj.is_fresh()) continue;
        auto it = est_in[i].find(s);
        const auto& in = it == est_in[i].end() ? none : it->second;
        est.entries.push_back(EstEntry{s, obj.pulse_step(in, ctx)});
      }

      std::uint32_t tainted = 0;
      for (std::uint32_t s = 0; s < p.index_num; ++s) {
        if (node.objs.at(s).is_fresh()) node.tainted[s] = false;
        tainted += node.tainted[s] ? 1 : 0;
      }

      nr.index_end = node.sig.get_index();
      nr.mvc = node.mvc.result();
      nr.non_fresh = node.objs.non_fresh();
      nr.live.resize(p.index_num);
      for (std::uint32_t s = 0; s < p.index_num; ++s) nr.live[s] = !node.objs.at(s).is_fresh();
      nr.tainted = tainted;
      nr.delivered = node.objs.at(current).delivered();

      Payload payload = multiplex(est.entries.empty() ? std::nullopt : std::optional(est),
                                  std::move(co_out), std::move(sig_out));
      outboxes[i] = Outbox(p.n, payload);
      rec.nodes.push_back(std::move(nr));
    }
    rec.order.push_back("correct");

    mail = net.exchange(r, outboxes, correct);

    std::uint64_t digest = 0xcbf29ce484222325ULL;
    for (NodeId j = 0; j < p.n; ++j) {
      for (NodeId i = 0; i < p.n; ++i) {
        const auto& env = mail[j].from(i);
        if (correct[i] && correct[j] && env.payload() != (*outboxes[i])[j]) {
          throw std::logic_error("reliable delivery violated in round " + std::to_string(r));
        }
        digest = fnv1a(serialize(env), digest);
      }
    }
    rec.digest = digest;
    trace.rounds.push_back(std::move(rec));
  }
  return trace;
}

std::optional<Round> measure_stabilization(const Trace& trace, Legality scope) {
  const Round total = trace.rounds.size();
  const std::uint32_t kappa = trace.config.params.kappa;
  Round start = total;
  while (start > 0 && round_legal(trace, start - 1, scope)) --start;
  if (start + kappa > total) return std::nullopt;
  return start;
}

Metrics compute_metrics(const Trace& trace) {
  const Params& p = trace.config.params;
  const std::uint32_t kappa = p.kappa;
  const Round total = trace.rounds.size();
  Metrics m;
  m.seed = p.seed;
  m.stabilization_round = measure_stabilization(trace, Legality::kFull);
  m.core_stabilization_round = measure_stabilization(trace, Legality::kCore);

  for (const auto& rec : trace.rounds) m.instances_completed += rec.completed;

  // Index agreement per cycle.
  for (Round end = kappa - 1; end < total; end += kappa) {
    const auto& last = trace.rounds[end];
    const bool agreed = all_equal_index(last);
    if (agreed && !m.cycles_to_index_agreement) m.cycles_to_index_agreement = end / kappa + 1;
    if (!starts_equal(trace.rounds[end + 1 - kappa])) {
      ++m.unequal_cycles;
      if (agreed) ++m.converged_cycles;
    }
  }

  for (Round c = 2 * static_cast<Round>(kappa); c < total; c += kappa) {
    if (!capture_legal(trace, c)) ++m.capture_violations;
  }

  // Closure, from the first agreed cycle end at or after 2*kappa.
  std::optional<Round> anchor;
  for (Round end = kappa - 1; end < total; end += kappa) {
    if (end >= 2 * kappa && all_equal_index(trace.rounds[end])) {
      anchor = end;
      break;
    }
  }
  if (anchor) {
    for (Round end = *anchor + kappa; end < total; end += kappa) {
      ++m.closure_cycles;
      const auto& prev = trace.rounds[end - kappa].nodes;
      const auto& cur = trace.rounds[end].nodes;
      bool ok = all_equal_index(trace.rounds[end]);
      bool inc = false;
      for (std::size_t k = 0; k < cur.size(); ++k) {
        const Bit x = cur[k].mvc == MaybeValue{1} ? 1 : 0;
        inc = inc || x;
        ok = ok && cur[k].index_end == (prev[k].index_end + x) % p.index_bound;
      }
      if (!ok) ++m.closure_violations;
      if (inc) ++m.closure_increments;
    }
  }

  if (!m.stabilization_round) return m;
  // Round r* itself may still be repairing state; its successors start from legal states.
  const Round rs = *m.stabilization_round;
  for (Round r = rs + 1; r < total; ++r) {
    const auto& rec = trace.rounds[r];
    for (const auto& nr : rec.nodes) {
      if (nr.recycled != rec.nodes.front().recycled) {
        ++m.cor.agreement;
        break;
      }
    }
    if (incremented(rec)) {
      const Round c = r - rec.phase;
      bool evidence = false;
      if (c >= kappa) {
        for (const auto& nr : trace.rounds[c - kappa].nodes) {
          evidence = evidence || nr.raw_delivered;
        }
      }
      if (!evidence) ++m.cor.validity1;
    }
    if (rec.phase == 0 && r + 2 * kappa <= total) {
      const bool all = std::all_of(rec.nodes.begin(), rec.nodes.end(),
                                   [](const NodeRecord& nr) { return nr.raw_delivered; });
      if (all) {
        bool hit = false;
        for (Round q = r; q < r + 2 * kappa; ++q) hit = hit || incremented(trace.rounds[q]);
        if (!hit) ++m.cor.validity2;
      }
    }
    m.cor.assumption1 += rec.unread_recycles;
    for (const auto& nr : rec.nodes) {
      m.max_non_fresh = std::max(m.max_non_fresh, nr.non_fresh);
      if (nr.non_fresh > p.log_size + 1) ++m.cor.window;
    }
  }
  return m;
}

std::string csv_header() {
  return "seed,n,t,kappa,index_num,log_size,adversary,inject,core,rounds,"
         "stabilization_round,core_stabilization_round,cycles_to_index_agreement,"
         "viol_agreement,viol_validity1,viol_validity2,viol_assumption1,viol_window,"
         "capture_violations,closure_violations,instances_completed";
}

std::string csv_row(const TrialConfig& config, const Metrics& m) {
  const Params& p = config.params;
  std::ostringstream os;
  os << m.seed << ',' << p.n << ',' << p.t << ',' << p.kappa << ',' << p.index_num << ','
     << p.log_size << ',' << to_string(config.adversary) << ',' << to_string(config.inject) << ','
     << (config.core == CoreKind::kStub ? "stub" : "mmr-lite") << ',' << config.rounds << ','
     << show_na(m.stabilization_round) << ',' << show_na(m.core_stabilization_round) << ','
     << show_na(m.cycles_to_index_agreement) << ','
     << m.cor.agreement << ',' << m.cor.validity1 << ',' << m.cor.validity2 << ','
     << m.cor.assumption1 << ',' << m.cor.window << ',' << m.capture_violations << ','
     << m.closure_violations << ',' << m.instances_completed;
  return os.str();
}

void write_summary(std::ostream& os, const std::vector<Metrics>& all) {
  auto median = [](std::vector<std::uint64_t> xs) -> std::string {
    if (xs.empty()) return "NA";
    std::sort(xs.begin(), xs.end());
    const std::size_t h = xs.size() / 2;
    if (xs.size() % 2 == 1) return std::to_string(xs[h]);
    std::ostringstream s;
    s << std::fixed << std::setprecision(1) << (static_cast<double>(xs[h - 1]) + xs[h]) / 2.0;
    return s.str();
  };
  std::vector<std::uint64_t> stab;
  std::vector<std::uint64_t> agree;
  std::vector<std::uint64_t> completed;
  CorViolations cor;
  std::uint64_t capture = 0;
  for (const auto& m : all) {
    if (m.stabilization_round) stab.push_back(*m.stabilization_round);
    if (m.cycles_to_index_agreement) agree.push_back(*m.cycles_to_index_agreement);
    completed.push_back(m.instances_completed);
    cor.agreement += m.cor.agreement;
    cor.validity1 += m.cor.validity1;
    cor.validity2 += m.cor.validity2;
    cor.assumption1 += m.cor.assumption1;
    cor.window += m.cor.window;
    capture += m.capture_violations;
  }
  os << "trials: " << all.size() << "\n"
     << "stabilized: " << stab.size() << "/" << all.size() << "\n"
     << "median stabilization_round: " << median(stab) << "\n"
     << "median cycles_to_index_agreement: " << median(agree) << "\n"
     << "median instances_completed: " << median(completed) << "\n"
     << "violations: agreement=" << cor.agreement << " validity1=" << cor.validity1
     << " validity2=" << cor.validity2 << " assumption1=" << cor.assumption1
     << " window=" << cor.window << " capture=" << capture << "\n";
}

void write_trace(std::ostream& os, const Trace& trace) {
  const auto& cfg = trace.config;
  const Params& p = cfg.params;
  os << "# seed=" << p.seed << " n=" << p.n << " t=" << p.t << " kappa=" << p.kappa
     << " I=" << p.index_bound << " index_num=" << p.index_num << " log_size=" << p.log_size
     << " adversary=" << to_string(cfg.adversary) << " inject=" << to_string(cfg.inject)
     << " rounds=" << cfg.rounds << "\n# byzantine=";
  for (std::size_t k = 0; k < trace.byzantine.size(); ++k) {
    os << (k ? "," : "") << trace.byzantine[k];
  }
  os << "\n# corrupted_fields=" << trace.corruption_log.size() << "\n";
  for (const auto& rec : trace.rounds) {
    os << "r=" << rec.round << " ph=" << rec.phase << " coin=" << int(rec.coin) << " digest="
       << std::hex << std::setw(16) << std::setfill('0') << rec.digest << std::dec
       << std::setfill(' ');
    for (const auto& nr : rec.nodes) {
      os << " | n" << nr.id << " idx=" << nr.index_start << "->" << nr.index_end
         << " mvc=" << show(nr.mvc);
      if (nr.input) os << " in=" << *nr.input << " wd=" << nr.raw_delivered;
      os << " nf=" << nr.non_fresh << " del=";
      for (bool b : nr.delivered) os << (b ? '1' : '0');
      if (!nr.recycled.empty()) {
        os << " rec=";
        for (std::size_t k = 0; k < nr.recycled.size(); ++k) os << (k ? "," : "") << nr.recycled[k];
      }
    }
    os << "\n";
  }
}

}  // namespace ssbft
