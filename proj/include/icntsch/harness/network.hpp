#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "icntsch/adapt/controller.hpp"
#include "icntsch/csma/csma_mac.hpp"
#include "icntsch/harness/metrics.hpp"
#include "icntsch/harness/scenario.hpp"
#include "icntsch/icn/forwarder.hpp"
#include "icntsch/routing/dodag.hpp"
#include "icntsch/sim/kernel.hpp"
#include "icntsch/tsch/collision_checker.hpp"
#include "icntsch/tsch/mac.hpp"
#include "icntsch/tsch/schedule_builder.hpp"

namespace icntsch::harness {

struct RunOptions {
  bool verbose_trace = false;
  // Re-checks the live TSCH schedules at every slotframe boundary.
  bool audit_schedule = false;
};

struct RunOutput {
  MetricsRecord metrics;
  TraceLog trace;
  std::vector<adapt::AdaptationLogRow> adaptation;
  tsch::NetworkSchedule static_schedule;
  tsch::NetworkSchedule final_schedule;
  routing::Dodag dodag;
  LinkCounters link;
  std::optional<std::uint64_t> bootstrap_asn;
  std::optional<std::uint64_t> completion_asn;
  std::optional<std::uint64_t> dyn_cleared_asn;
  std::uint64_t end_asn = 0;
  std::uint64_t timeout_slots = 0;
  // Largest count on any directed link, sampled at slotframe boundaries.
  std::uint32_t peak_link_interest_cells = 0;
  std::uint32_t peak_link_dyn_interest = 0;
  std::uint32_t peak_link_dyn_content = 0;
  std::uint64_t dyn_cells_outside_range = 0;
  std::uint64_t audit_violations = 0;
  std::uint64_t dead_ends = 0;
};

namespace detail {

struct ChunkState {
  std::uint32_t attempts = 0;
  std::uint64_t nonce = 0;
  std::uint64_t first_asn = 0;
  std::optional<sim::EventHandle> timer;
};

struct ConsumerApp {
  NodeId node = kNoNode;
  icn::Name prefix;
  std::uint32_t total = 0;  // 0: keeps asking until told to stop
  double rate = 1.0;        // new Interests per slotframe
  bool main = false;
  bool active = false;
  double credit = 0.0;
  std::uint32_t next = 0;
  std::uint32_t delivered = 0;
  std::uint32_t failed = 0;
  std::map<std::uint32_t, ChunkState> pending;

  bool finished() const { return total > 0 && delivered + failed == total; }
  bool exhausted() const { return total > 0 && next >= total; }
};

using Demand = std::map<NodeId, std::map<icn::FaceId, std::set<icn::Name>>>;

class Network : public LinkUpcalls {
 public:
  Network(const ScenarioConfig& cfg, MacMode mode, std::uint64_t seed, RunOptions opt)
      : cfg_(cfg),
        mode_(mode),
        seed_(seed),
        opt_(opt),
        graph_(cfg.graph(is_tsch(mode) && cfg.tsch_ideal_medium)),
        dodag_(routing::build_dodag(graph_, cfg.root)),
        length_(cfg.schedule.partition.length),
        trace_(opt.verbose_trace) {
    cfg_.validate();
    std::uint64_t pit_slots = 0;
    if (is_tsch(mode)) {
      static_ = tsch::build_static_schedule(graph_, dodag_, cfg_.schedule);
      tsch_ = std::make_unique<tsch::TschMac>(graph_, static_, cfg_.tsch_mac, seed, energy_, trace_);
      if (mode != MacMode::kSinr) tsch_->set_all_content_active(false);
      if (mode == MacMode::kAdinr) {
        ctrl_ = std::make_unique<adapt::AdaptiveController>(cfg_.adaptive, cfg_.schedule.k, graph_, dodag_);
        ctrl_->bootstrap_knowledge(*tsch_);
      }
      // Worst case up and down the tree, one slotframe per hop and per
      // content cell, plus slack.
      const auto h = dodag_.height();
      timeout_slots_ = std::uint64_t{h + cfg_.schedule.k * h + 2} * length_;
      pit_slots = timeout_slots_;
    } else {
      csma_ = std::make_unique<csma::CsmaMac>(graph_, cfg_.csma, seed, energy_, trace_);
      timeout_slots_ = cfg_.slots_for_ms(cfg_.consumer_policy.csma_timeout_ms);
      pit_slots = cfg_.slots_for_ms(cfg_.consumer_policy.csma_pit_lifetime_ms);
    }
    if (mode == MacMode::kCsma3 || mode == MacMode::kCsma3St) retry_limit_ = cfg_.consumer_policy.limited_retries;

    const bool side = !cfg_.side.nodes.empty() && (!is_tsch(mode) || cfg_.side.in_tsch);
    for (NodeId n : graph_.nodes()) {
      auto [it, _] = fwd_.try_emplace(n, n, &dodag_, cfg_.fib_capacity, pit_slots);
      if (n == cfg_.producer) it->second.add_producer_prefix(icn::Name::parse(cfg_.content_prefix));
      if (n == cfg_.root && side) it->second.add_producer_prefix(icn::Name::parse(cfg_.side.prefix));
      app_rng_.emplace(n, sim::make_stream(seed, n, sim::StreamPurpose::kApp));
    }

    ConsumerApp main;
    main.node = cfg_.consumer;
    main.prefix = icn::Name::parse(cfg_.content_prefix);
    main.total = cfg_.chunks;
    main.rate = mode == MacMode::kAdinr ? cfg_.consumer_policy.adinr_rate : cfg_.consumer_policy.rate;
    main.main = true;
    apps_.emplace(main.node, main);
    if (side) {
      const double rate = cfg_.side.rate * (mode == MacMode::kCsma3St ? cfg_.side.heavy_multiplier : 1.0);
      for (NodeId n : cfg_.side.nodes) {
        ConsumerApp a;
        a.node = n;
        a.prefix = icn::Name::parse(cfg_.side.prefix).append(std::to_string(n));
        a.rate = rate;
        apps_.emplace(n, a);
      }
    }
    if (cfg_.producer != cfg_.root) nam_expected_.insert(cfg_.producer);
  }

  RunOutput run() {
    trace_.emit(0, cfg_.consumer, "run_start",
                {{"config", mode_name(mode_)},
                 {"seed", seed_},
                 {"chunks", cfg_.chunks},
                 {"slot_ms", cfg_.slot_ms},
                 {"nodes", graph_.node_count()},
                 {"timeout_slots", timeout_slots_}});
    schedule_slot(0);
    kernel_.run_until([this] { return stop_; });

    for (NodeId n : graph_.nodes()) {
      const auto& e = energy_[n];
      trace_.emit(end_asn_, n, "energy", {{"mJ", e.millijoules(cfg_.power)}, {"mean_mW", e.mean_mw(cfg_.power)}});
    }
    trace_.emit(end_asn_, cfg_.consumer, "run_end",
                {{"duration_s", static_cast<double>(end_asn_ + 1) * cfg_.slot_ms / 1000.0},
                 {"delivered", apps_.at(cfg_.consumer).delivered},
                 {"failed", apps_.at(cfg_.consumer).failed}});

    RunOutput out;
    out.metrics = metrics_from_trace(trace_.events());
    out.static_schedule = static_;
    if (tsch_) {
      out.final_schedule = tsch_->schedules();
      out.link = tsch_->counters();
    } else {
      out.link = csma_->counters();
    }
    if (ctrl_) out.adaptation = ctrl_->log();
    out.dodag = dodag_;
    out.bootstrap_asn = bootstrap_asn_;
    out.completion_asn = completion_asn_;
    out.dyn_cleared_asn = dyn_cleared_asn_;
    out.end_asn = end_asn_;
    out.timeout_slots = timeout_slots_;
    out.peak_link_interest_cells = peak_interest_;
    out.peak_link_dyn_interest = peak_dyn_interest_;
    out.peak_link_dyn_content = peak_dyn_content_;
    out.dyn_cells_outside_range = dyn_outside_;
    out.audit_violations = audit_violations_;
    for (const auto& [_, f] : fwd_) out.dead_ends += f.dead_ends();
    out.trace = std::move(trace_);
    return out;
  }

  // --- link upcalls ---------------------------------------------------------

  void on_receive(NodeId at, NodeId from, const icn::Frame& frame, sim::Asn asn) override {
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, icn::Interest>) {
            interest_in(at, from, p, asn);
          } else if constexpr (std::is_same_v<T, icn::DataChunk>) {
            data_in(at, from, p, asn);
          } else if constexpr (std::is_same_v<T, icn::Dio>) {
            if (!joined_.count(at) && dodag_.parent(at) == from) join(at, asn);
          } else if constexpr (std::is_same_v<T, icn::Dao>) {
            dao_seen_.insert(p.child);
            trace_.debug(asn, at, "dao_rx", {{"child", p.child}});
          } else if constexpr (std::is_same_v<T, icn::Nam>) {
            auto r = fwd_.at(at).on_nam(p, from, asn);
            if (dodag_.is_root(at)) nam_seen_.insert(p.origin);
            for (auto& s : r.sends) send(at, s.face, std::move(s.packet));
          }
        },
        frame.packet);
  }

  void on_first_tx(NodeId at, const icn::Frame& frame, sim::Asn asn) override {
    const auto* i = std::get_if<icn::Interest>(&frame.packet);
    if (!i) return;
    fwd_.at(at).refresh(i->name, asn);
    auto app = apps_.find(at);
    if (app == apps_.end()) return;
    auto idx = icn::chunk_index(i->name);
    if (!idx || !app->second.prefix.is_prefix_of(i->name)) return;
    auto st = app->second.pending.find(*idx);
    if (st != app->second.pending.end() && st->second.nonce == i->nonce && !st->second.timer)
      arm_timer(app->second, *idx, asn);
  }

  void on_tx_done(NodeId at, const icn::Frame& frame, bool delivered, sim::Asn asn) override {
    if (const auto* i = std::get_if<icn::Interest>(&frame.packet)) {
      if (delivered && frame.destination) demand_add(rx_demand_, at, *frame.destination, i->name, tsch::CellRole::kRx);
    } else if (const auto* d = std::get_if<icn::DataChunk>(&frame.packet)) {
      if (frame.destination) demand_drop(tx_demand_, at, *frame.destination, d->name, tsch::CellRole::kTx);
    } else if (std::holds_alternative<icn::Dio>(frame.packet)) {
      dio_queued_.erase(at);
    } else if (!delivered && frame.destination &&
               (std::holds_alternative<icn::Dao>(frame.packet) || std::holds_alternative<icn::Nam>(frame.packet))) {
      trace_.debug(asn, at, "control_requeue", {{"kind", icn::packet_kind(frame.packet)}});
      send(at, *frame.destination, frame.packet);
    }
  }

  void decorate(NodeId at, icn::Frame& frame) override {
    if (!ctrl_ || frame.broadcast()) return;
    if (auto* i = std::get_if<icn::Interest>(&frame.packet)) {
      i->piggyback = ctrl_->advertise(at, *tsch_);
    } else if (auto* d = std::get_if<icn::DataChunk>(&frame.packet)) {
      d->piggyback = ctrl_->advertise(at, *tsch_);
    }
  }

 private:
  // --- slot loop -------------------------------------------------------------

  void schedule_slot(sim::Asn asn) {
    kernel_.schedule(asn, sim::Phase::kTxDecision, [this, asn] { begin_slot(asn); });
    kernel_.schedule(asn, sim::Phase::kMediumResolution, [this, asn] {
      if (csma_) {
        csma_->run_slot(asn, *this);
      } else {
        tsch_->resolve();
      }
    });
    kernel_.schedule(asn, sim::Phase::kRxDelivery, [this, asn] {
      if (tsch_) tsch_->deliver(asn, *this);
    });
    kernel_.schedule(asn, sim::Phase::kBookkeeping, [this, asn] { end_slot(asn); });
  }

  void finish(sim::Asn last_slot) {
    stop_ = true;
    end_asn_ = last_slot;
  }

  void begin_slot(sim::Asn asn) {
    if (asn % length_ == 0) {
      frame_boundary(asn, asn / length_);
      if (stop_) return;
    }
    if (tsch_) tsch_->decide(asn, *this);
  }

  void frame_boundary(sim::Asn asn, std::uint64_t frame) {
    if (ctrl_ && frame > 0) {
      ctrl_->on_frame_end(asn, frame - 1, *tsch_);
      sample_dynamic_cells();
    }
    if (tsch_ && opt_.audit_schedule) audit_violations_ += tsch::check_collision_free(tsch_->schedules(), graph_).size();

    if (completion_asn_) {
      // Only ADINR keeps running past completion, to watch the release.
      if (ctrl_ && ctrl_->dynamic_bursts() == 0) {
        dyn_cleared_asn_ = asn;
        finish(asn - 1);
        return;
      }
      if (asn >= *completion_asn_ + std::uint64_t{cfg_.drain_slotframes} * length_) {
        finish(asn - 1);
        return;
      }
    }
    if (frame >= cfg_.max_slotframes) {
      trace_.emit(asn, cfg_.consumer, "cutoff", {{"slotframes", frame}});
      finish(asn - 1);
      return;
    }

    if (frame == 0) {
      join(cfg_.root, asn);
    } else if (!bootstrap_asn_) {
      for (NodeId n : joined_)
        if (!dio_queued_.count(n)) send_dio(n);
    }

    if (bootstrap_asn_) {
      for (auto& [_, a] : apps_) {
        if (!a.active && (a.main || !completion_asn_)) a.active = true;
        if (!a.main && completion_asn_) a.active = false;
        if (!a.active) continue;
        a.credit += a.rate;
        while (a.credit >= 1.0 - 1e-9 && !a.exhausted()) {
          a.credit -= 1.0;
          issue(a, a.next++, false, asn);
        }
      }
    }
  }

  void end_slot(sim::Asn asn) {
    for (auto& [n, f] : fwd_) {
      for (const auto& e : f.expire(asn)) {
        for (icn::FaceId out : e.out_faces) demand_drop(rx_demand_, n, out, e.name, tsch::CellRole::kRx);
        for (icn::FaceId in : e.in_faces)
          if (in != icn::kAppFace) demand_drop(tx_demand_, n, in, e.name, tsch::CellRole::kTx);
      }
    }
    if (!bootstrap_asn_ && bootstrap_complete()) {
      bootstrap_asn_ = asn;
      if (cfg_.exclude_silent_children)
        for (auto& [_, f] : fwd_) f.exclude_silent_children(asn);
      trace_.emit(asn, cfg_.root, "bootstrap_done", {{"joined", joined_.size()}});
    }
    if (!completion_asn_ && apps_.at(cfg_.consumer).finished()) {
      completion_asn_ = asn;
      trace_.emit(asn, cfg_.consumer, "complete", {{"delivered", apps_.at(cfg_.consumer).delivered}});
      if (!ctrl_) {
        finish(asn);
        return;
      }
      if (ctrl_->dynamic_bursts() == 0) {
        dyn_cleared_asn_ = asn;
        finish(asn);
        return;
      }
    }
    schedule_slot(asn + 1);
  }

  // --- bootstrap -------------------------------------------------------------

  void join(NodeId n, sim::Asn asn) {
    joined_.insert(n);
    trace_.debug(asn, n, "join", {{"rank", dodag_.rank(n)}});
    send_dio(n);
    if (dodag_.is_root(n)) return;
    const NodeId parent = dodag_.parent(n);
    send(n, parent, icn::Dao{n, graph_.neighbors(n)});
    if (n == cfg_.producer) send(n, parent, icn::Nam{icn::Name::parse(cfg_.content_prefix), n});
  }

  void send_dio(NodeId n) {
    dio_queued_.insert(n);
    send(n, std::nullopt, icn::Dio{cfg_.root, dodag_.rank(n), graph_.neighbors(n)});
  }

  bool bootstrap_complete() const {
    if (joined_.size() != graph_.node_count() || dao_seen_.size() + 1 != graph_.node_count()) return false;
    for (NodeId n : nam_expected_)
      if (!nam_seen_.count(n)) return false;
    return true;
  }

  // --- consumers -------------------------------------------------------------

  void issue(ConsumerApp& a, std::uint32_t chunk, bool retx, sim::Asn asn) {
    auto& st = a.pending[chunk];
    if (st.timer) kernel_.cancel(*st.timer);
    st.timer.reset();
    if (st.attempts == 0) st.first_asn = asn;
    ++st.attempts;
    st.nonce = app_rng_.at(a.node).next();
    const auto name = a.prefix.append(std::to_string(chunk));
    if (a.main) {
      trace_.emit(asn, a.node, "interest_out", {{"chunk", chunk}, {"retx", retx}, {"attempt", st.attempts}});
    } else {
      trace_.debug(asn, a.node, "side_interest_out", {{"chunk", chunk}, {"retx", retx}});
    }
    auto r = fwd_.at(a.node).on_interest(icn::Interest{name, st.nonce, icn::Direction::kUp, {}}, icn::kAppFace, asn);
    if (r.sends.empty()) {
      arm_timer(a, chunk, asn);
      return;
    }
    for (auto& s : r.sends) send(a.node, s.face, std::move(s.packet));
  }

  void arm_timer(ConsumerApp& a, std::uint32_t chunk, sim::Asn asn) {
    auto& st = a.pending.at(chunk);
    const NodeId node = a.node;
    const auto nonce = st.nonce;
    st.timer = kernel_.schedule(asn + timeout_slots_, sim::Phase::kBookkeeping,
                                [this, node, chunk, nonce] { on_timeout(node, chunk, nonce); });
  }

  void on_timeout(NodeId node, std::uint32_t chunk, std::uint64_t nonce) {
    auto& a = apps_.at(node);
    auto it = a.pending.find(chunk);
    if (it == a.pending.end() || it->second.nonce != nonce) return;
    it->second.timer.reset();
    const auto asn = kernel_.now();
    if (retry_limit_ && it->second.attempts > *retry_limit_) {
      a.pending.erase(it);
      ++a.failed;
      if (a.main) trace_.emit(asn, node, "chunk_failed", {{"chunk", chunk}});
      return;
    }
    issue(a, chunk, true, asn);
  }

  void app_data(NodeId at, const icn::DataChunk& d, sim::Asn asn) {
    auto it = apps_.find(at);
    if (it == apps_.end()) return;
    auto& a = it->second;
    auto st = a.pending.find(d.index);
    if (st == a.pending.end()) {
      if (a.main) trace_.emit(asn, at, "dup_chunk", {{"chunk", d.index}, {"late", true}});
      return;
    }
    if (st->second.timer) kernel_.cancel(*st->second.timer);
    ++a.delivered;
    if (a.main) {
      trace_.emit(asn, at, "chunk_rx",
                  {{"chunk", d.index}, {"attempts", st->second.attempts}, {"latency_slots", asn - st->second.first_asn}});
    }
    a.pending.erase(st);
  }

  // --- forwarding ------------------------------------------------------------

  void interest_in(NodeId at, NodeId from, const icn::Interest& i, sim::Asn asn) {
    if (ctrl_ && i.piggyback) ctrl_->merge(at, *i.piggyback);
    auto r = fwd_.at(at).on_interest(i, from, asn);
    trace_.debug(asn, at, "interest_rx", {{"from", from}, {"name", i.name.to_string()}, {"outcome", static_cast<int>(r.outcome)}});
    switch (r.outcome) {
      case icn::InterestOutcome::kProduced:
      case icn::InterestOutcome::kForwarded:
      case icn::InterestOutcome::kReforwarded:
      case icn::InterestOutcome::kAggregated:
        demand_add(tx_demand_, at, from, i.name, tsch::CellRole::kTx);
        break;
      default:
        break;
    }
    for (auto& s : r.sends) send(at, s.face, std::move(s.packet));
  }

  void data_in(NodeId at, NodeId from, const icn::DataChunk& d, sim::Asn asn) {
    if (ctrl_ && d.piggyback) ctrl_->merge(at, *d.piggyback);
    demand_drop(rx_demand_, at, from, d.name, tsch::CellRole::kRx);
    auto r = fwd_.at(at).on_data(d, from, asn);
    if (r.unsolicited) {
      if (at == cfg_.consumer) {
        trace_.emit(asn, at, "dup_chunk", {{"chunk", d.index}, {"late", false}});
      } else {
        trace_.debug(asn, at, "unsolicited", {{"name", d.name.to_string()}});
      }
      return;
    }
    for (icn::FaceId f : r.satisfied->out_faces)
      if (f != from) demand_drop(rx_demand_, at, f, d.name, tsch::CellRole::kRx);
    for (auto& s : r.sends) {
      if (s.face == icn::kAppFace) {
        app_data(at, std::get<icn::DataChunk>(s.packet), asn);
      } else {
        send(at, s.face, std::move(s.packet));
      }
    }
  }

  void send(NodeId at, std::optional<NodeId> to, icn::Packet packet) {
    icn::Frame f{next_frame_++, at, to, std::move(packet)};
    if (tsch_) {
      tsch_->enqueue(at, std::move(f));
    } else {
      csma_->enqueue(at, std::move(f));
    }
  }

  // --- content-cell activation -----------------------------------------------

  bool on_demand() const { return mode_ == MacMode::kDinr || mode_ == MacMode::kAdinr; }

  void demand_add(Demand& d, NodeId at, icn::FaceId face, const icn::Name& name, tsch::CellRole role) {
    if (!on_demand() || face == icn::kAppFace) return;
    auto& set = d[at][face];
    if (set.insert(name).second) apply(at, face, set.size(), role);
  }

  void demand_drop(Demand& d, NodeId at, icn::FaceId face, const icn::Name& name, tsch::CellRole role) {
    if (!on_demand() || face == icn::kAppFace) return;
    auto& set = d[at][face];
    if (set.erase(name)) apply(at, face, set.size(), role);
  }

  void apply(NodeId at, icn::FaceId face, std::size_t pending, tsch::CellRole role) {
    tsch_->set_content_activation(at, face, role, static_cast<std::uint32_t>(pending) * cfg_.schedule.k);
  }

  // --- dynamic cell bookkeeping ----------------------------------------------

  void sample_dynamic_cells() {
    const auto& part = cfg_.schedule.partition;
    for (NodeId n : tsch_->node_ids()) {
      std::map<NodeId, std::uint32_t> interest, dyn_i, dyn_c;
      for (const auto& c : tsch_->schedule(n).cells()) {
        if (c.role != tsch::CellRole::kTx || c.broadcast) continue;
        if (c.ssf == tsch::Subframe::kDynamic) {
          if (part.subframe_of(c.slot) != tsch::Subframe::kDynamic) ++dyn_outside_;
          ++(c.use == tsch::CellUse::kInterest ? dyn_i : dyn_c)[c.peer];
        }
        if (c.use == tsch::CellUse::kInterest) ++interest[c.peer];
      }
      for (const auto& [_, v] : interest) peak_interest_ = std::max(peak_interest_, v);
      for (const auto& [_, v] : dyn_i) peak_dyn_interest_ = std::max(peak_dyn_interest_, v);
      for (const auto& [_, v] : dyn_c) peak_dyn_content_ = std::max(peak_dyn_content_, v);
    }
  }

  ScenarioConfig cfg_;
  MacMode mode_;
  std::uint64_t seed_;
  RunOptions opt_;
  radio::ConnectivityGraph graph_;
  routing::Dodag dodag_;
  std::uint32_t length_;
  sim::Simulator kernel_;
  TraceLog trace_;
  EnergyLedger energy_;
  tsch::NetworkSchedule static_;
  std::unique_ptr<tsch::TschMac> tsch_;
  std::unique_ptr<csma::CsmaMac> csma_;
  std::unique_ptr<adapt::AdaptiveController> ctrl_;
  std::map<NodeId, icn::Forwarder> fwd_;
  std::map<NodeId, sim::Rng> app_rng_;
  std::map<NodeId, ConsumerApp> apps_;
  std::optional<std::uint32_t> retry_limit_;
  std::uint64_t timeout_slots_ = 0;
  std::uint64_t next_frame_ = 1;
  Demand tx_demand_, rx_demand_;

  std::set<NodeId> joined_, dao_seen_, nam_seen_, nam_expected_, dio_queued_;
  std::optional<std::uint64_t> bootstrap_asn_, completion_asn_, dyn_cleared_asn_;
  bool stop_ = false;
  std::uint64_t end_asn_ = 0;

  std::uint32_t peak_interest_ = 0, peak_dyn_interest_ = 0, peak_dyn_content_ = 0;
  std::uint64_t dyn_outside_ = 0;
  std::uint64_t audit_violations_ = 0;
};

}  // namespace detail

inline RunOutput run_experiment(const ScenarioConfig& cfg, MacMode mode, std::uint64_t seed, RunOptions opt = {}) {
  detail::Network net(cfg, mode, seed, opt);
  return net.run();
}

}  // namespace icntsch::harness
