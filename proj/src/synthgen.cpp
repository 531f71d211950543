#include "wifitrack/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <tuple>
#include <unordered_set>

#include "wifitrack/random.hpp"

namespace wifitrack {

namespace {

// Buildings are at least this far apart, so an AP is only ever in range of
// people at its own building or passing by.
constexpr double kBuildingSeparationM = 200.0;
constexpr double kBuildingRadiusM = 15.0;
constexpr double kOutdoorClearanceM = 160.0;
constexpr double kStayJitterM = 10.0;  // per axis
constexpr double kWalkSpeed = 1.4;
constexpr double kRideSpeed = 6.0;
constexpr double kWalkLimitM = 1000.0;
constexpr double kBusSpeed = 7.0;
constexpr std::int64_t kHourMs = 60 * kMinuteMs;

double dist(PlanePoint a, PlanePoint b) { return std::hypot(a.x - b.x, a.y - b.y); }

PlanePoint lerp(PlanePoint a, PlanePoint b, double f) {
    return {a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f};
}

PlanePoint segment_position(const Segment& s, std::int64_t t) {
    if (t <= s.start_ms || s.end_ms <= s.start_ms) return s.from;
    if (t >= s.end_ms) return s.to;
    return lerp(s.from, s.to,
                static_cast<double>(t - s.start_ms) / static_cast<double>(s.end_ms - s.start_ms));
}

double round7(double v) { return std::round(v * 1e7) / 1e7; }

// Point buckets on the plane.
class PlaneGrid {
public:
    explicit PlaneGrid(double cell) : cell_(cell) {}

    void insert(PlanePoint p, std::size_t id) { cells_[key(cx(p.x), cx(p.y))].push_back(id); }

    template <typename F>
    void visit(PlanePoint p, double radius, F&& f) const {
        const auto r = static_cast<std::int64_t>(std::ceil(radius / cell_));
        const std::int64_t x0 = cx(p.x), y0 = cx(p.y);
        for (std::int64_t dx = -r; dx <= r; ++dx)
            for (std::int64_t dy = -r; dy <= r; ++dy) {
                const auto it = cells_.find(key(x0 + dx, y0 + dy));
                if (it == cells_.end()) continue;
                for (std::size_t id : it->second) f(id);
            }
    }

private:
    std::int64_t cx(double v) const { return static_cast<std::int64_t>(std::floor(v / cell_)); }
    static std::uint64_t key(std::int64_t x, std::int64_t y) {
        return (static_cast<std::uint64_t>(x) << 32) ^ (static_cast<std::uint64_t>(y) & 0xffffffffULL);
    }
    double cell_;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

PlanePoint disc_offset(Rng& rng, PlanePoint c, double radius) {
    const double r = radius * std::sqrt(rng.uniform());
    const double a = 2.0 * std::numbers::pi * rng.uniform();
    return {c.x + r * std::cos(a), c.y + r * std::sin(a)};
}

std::vector<double> make_density(const WorldSpec& spec, Rng rng) {
    const int n = spec.density_cells;
    std::vector<double> w(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    if (!spec.density_weights.empty()) {
        if (spec.density_weights.size() != w.size())
            throw ContractError("density_weights must hold density_cells^2 values");
        w = spec.density_weights;
    } else {
        const double hw = spec.city_km_x * 500.0, hh = spec.city_km_y * 500.0;
        struct Bump {
            PlanePoint c;
            double a, s;
        };
        std::vector<Bump> bumps{{{0.0, 0.0}, 1.0, 0.18 * std::min(hw, hh) * 2.0}};
        for (int k = 0; k < 4; ++k)
            bumps.push_back({{rng.uniform(-0.7 * hw, 0.7 * hw), rng.uniform(-0.7 * hh, 0.7 * hh)},
                             rng.uniform(0.3, 0.8), rng.uniform(500.0, 1300.0)});
        const double cw = 2.0 * hw / n, ch = 2.0 * hh / n;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const PlanePoint p{-hw + (i + 0.5) * cw, -hh + (j + 0.5) * ch};
                double v = 0.04;
                for (const auto& b : bumps) {
                    const double d = dist(p, b.c);
                    v += b.a * std::exp(-d * d / (2.0 * b.s * b.s));
                }
                w[static_cast<std::size_t>(j * n + i)] = v;
            }
    }
    double sum = 0.0;
    for (double v : w) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw ContractError("density weights must be >= 0");
        sum += v;
    }
    if (!(sum > 0.0)) throw ContractError("infeasible world: zero density everywhere");
    for (double& v : w) v *= static_cast<double>(w.size()) / sum;
    return w;
}

BssidId fresh_bssid(Rng& rng, std::unordered_set<std::uint64_t>& used) {
    for (;;) {
        // Locally administered unicast addresses.
        const std::uint64_t v = (rng.next() & 0xfcffffffffffULL) | 0x020000000000ULL;
        if (used.insert(v).second) return BssidId(v);
    }
}

std::string hex4(std::uint64_t v) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string s(4, '0');
    for (int i = 3; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = kDigits[v & 0xf];
        v >>= 4;
    }
    return s;
}

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

class Claims {
public:
    explicit Claims(const GroundTruth& gt) : gt_(gt), taken_(gt.buildings.size(), false) {}

    void claim(int b) { taken_[static_cast<std::size_t>(b)] = true; }

    // Unclaimed building, weighted by exp(-d / scale) from `near` when given.
    int pick(Rng& rng, std::optional<PlanePoint> near = std::nullopt, double scale = 0.0) {
        std::vector<double> w(taken_.size(), 0.0);
        double total = 0.0;
        for (std::size_t b = 0; b < taken_.size(); ++b) {
            if (taken_[b]) continue;
            w[b] = near ? std::exp(-dist(*near, gt_.buildings[b].pos) / scale) : 1.0;
            total += w[b];
        }
        if (!(total > 0.0))
            throw ContractError("infeasible world: too few buildings for the requested users");
        double u = rng.uniform() * total;
        for (std::size_t b = 0; b < w.size(); ++b) {
            if (w[b] == 0.0) continue;
            u -= w[b];
            if (u <= 0.0) {
                claim(static_cast<int>(b));
                return static_cast<int>(b);
            }
        }
        for (std::size_t b = w.size(); b-- > 0;)
            if (w[b] > 0.0) {
                claim(static_cast<int>(b));
                return static_cast<int>(b);
            }
        throw ContractError("unreachable");
    }

private:
    const GroundTruth& gt_;
    std::vector<bool> taken_;
};

std::size_t densest_building(const GroundTruth& gt) {
    std::size_t best = 0;
    for (std::size_t b = 1; b < gt.buildings.size(); ++b)
        if (gt.buildings[b].density > gt.buildings[best].density) best = b;
    return best;
}

PlanePoint clamp_to_city(PlanePoint p, const WorldSpec& spec) {
    const double hw = spec.city_km_x * 500.0, hh = spec.city_km_y * 500.0;
    return {std::clamp(p.x, -hw, hw), std::clamp(p.y, -hh, hh)};
}

int make_outdoor_place(GroundTruth& gt, const PlaneGrid& bgrid, PlanePoint home, Rng& rng) {
    PlanePoint best = home;
    double best_clear = -1.0;
    for (int attempt = 0; attempt < 200; ++attempt) {
        const PlanePoint p = clamp_to_city(disc_offset(rng, home, 1500.0), gt.spec);
        double clear = 1e18;
        bgrid.visit(p, kOutdoorClearanceM, [&](std::size_t b) {
            clear = std::min(clear, dist(p, gt.buildings[b].pos));
        });
        if (clear >= kOutdoorClearanceM) {
            best = p;
            break;
        }
        if (clear > best_clear) {
            best_clear = clear;
            best = p;
        }
    }
    gt.places.push_back({best, -1});
    return static_cast<int>(gt.places.size() - 1);
}

// Appends stays and moves as the day plan unfolds.
class Itinerary {
public:
    Itinerary(const GroundTruth& gt, std::vector<Segment>& out, int place, PlanePoint pos,
              std::int64_t t)
        : gt_(gt), out_(out), t_(t), since_(t), pos_(pos), place_(place) {}

    std::int64_t now() const { return t_; }
    int place() const { return place_; }

    void wait_until(std::int64_t t) { t_ = std::max(t_, t); }

    // `routine` marks home and work, where a hotspot stays off.
    void go(int dest, bool routine, Rng& rng) {
        if (dest == place_) return;
        const PlanePoint c = gt_.places[static_cast<std::size_t>(dest)].pos;
        const PlanePoint target{c.x + rng.normal(0.0, kStayJitterM),
                                c.y + rng.normal(0.0, kStayJitterM)};
        close_stay();
        const double d = dist(pos_, target);
        const double speed = d < kWalkLimitM ? kWalkSpeed : kRideSpeed;
        const auto dur = std::max<std::int64_t>(1, std::llround(d / speed * 1000.0));
        out_.push_back({t_, t_ + dur, pos_, target, -1, true});
        t_ += dur;
        since_ = t_;
        pos_ = target;
        place_ = dest;
        routine_ = routine;
    }

    void finish(std::int64_t end) {
        t_ = std::max(t_, end);
        close_stay();
    }

private:
    void close_stay() {
        if (t_ > since_) out_.push_back({since_, t_, pos_, pos_, place_, !routine_});
        since_ = t_;
    }

    const GroundTruth& gt_;
    std::vector<Segment>& out_;
    std::int64_t t_, since_;
    PlanePoint pos_;
    int place_;
    bool routine_ = true;
};

int pick_outing(const Anchors& a, Rng& rng) {
    constexpr double kOutdoorShare = 0.4;
    if (a.others.empty() || rng.bernoulli(kOutdoorShare)) return a.outdoor;
    double u = rng.uniform();
    for (std::size_t i = 0; i < a.others.size(); ++i) {
        u -= a.weights[i];
        if (u <= 0.0) return a.others[i];
    }
    return a.others.back();
}

void plan_user(GroundTruth& gt, std::size_t u) {
    const auto& spec = gt.spec;
    UserTruth& user = gt.users[u];
    const Rng base = Rng(spec.seed, 1000 + u).split(1);
    Rng init = base.split(0xffff);
    const PlanePoint home0 = gt.places[static_cast<std::size_t>(user.anchors.home)].pos;
    Itinerary it(gt, user.segments, user.anchors.home,
                 {home0.x + init.normal(0.0, kStayJitterM), home0.y + init.normal(0.0, kStayJitterM)},
                 gt.start_ms());

    const auto hours = [](double h) { return static_cast<std::int64_t>(h * kHourMs); };
    for (int d = 0; d < spec.n_days; ++d) {
        const bool changed = spec.routine_change_day && d >= *spec.routine_change_day && user.partner >= 0;
        const Anchors& a = changed ? gt.users[static_cast<std::size_t>(user.partner)].anchors
                                   : user.anchors;
        Rng rng = base.split(static_cast<std::uint64_t>(d));
        const std::int64_t day0 = gt.start_ms() + d * kDayMs;
        const bool weekday = d % 7 < 5;  // the origin is a Monday

        it.wait_until(day0 + hours(std::clamp(rng.normal(7.5, 0.6), 5.5, 10.0)));
        if (weekday && rng.bernoulli(0.92)) {
            it.go(a.work, true, rng);
            const double leave = std::clamp(rng.normal(16.75, 1.0), 13.0, 20.0);
            it.wait_until(std::max(it.now() + hours(3.0), day0 + hours(leave)));
        } else {
            it.wait_until(day0 + hours(rng.uniform(9.0, 12.0)));
        }

        // Most days include a long spell outdoors, away from every AP.
        if (rng.bernoulli(0.8)) {
            it.go(a.outdoor, false, rng);
            it.wait_until(it.now() + hours(rng.uniform(1.0, 3.0)));
            it.go(a.home, true, rng);
        }
        const auto outings = rng.poisson(weekday ? 0.9 : 1.8);
        for (std::uint64_t k = 0; k < outings; ++k) {
            if (it.now() > day0 + hours(22.0)) break;
            it.go(pick_outing(a, rng), false, rng);
            const double stay_h = rng.truncated_power_law(0.25, 5.0, 1.5);
            it.wait_until(std::min(it.now() + hours(stay_h), day0 + hours(23.75)));
            if (k + 1 < outings && rng.bernoulli(0.4)) {
                it.go(a.home, true, rng);
                it.wait_until(it.now() + hours(rng.uniform(0.3, 1.5)));
            }
        }
        it.go(a.home, true, rng);
    }
    it.finish(gt.end_ms());
}

}  // namespace

void WorldSpec::validate() const {
    if (n_users < 1) throw ContractError("n_users must be >= 1");
    if (n_days < 1) throw ContractError("n_days must be >= 1");
    if (!(city_km_x > 0.0 && city_km_y > 0.0)) throw ContractError("city extent must be positive");
    if (density_cells < 1) throw ContractError("density_cells must be >= 1");
    if (n_buildings < 1) throw ContractError("n_buildings must be >= 1");
    if (n_static_aps < 0) throw ContractError("n_static_aps must be >= 0");
    if (!(ap_count_sigma >= 0.0)) throw ContractError("ap_count_sigma must be >= 0");
    if (!(visibility_radius_m > 0.0)) throw ContractError("visibility_radius_m must be positive");
    if (!(wifi_scan_period_s > 0.0)) throw ContractError("wifi_scan_period_s must be positive");
    if (!(gps_period_s > 0.0)) throw ContractError("gps_period_s must be positive");
    if (!(gps_noise_m >= 0.0)) throw ContractError("gps_noise_m must be >= 0");
    if (!(mobile_ap_fraction >= 0.0 && mobile_ap_fraction <= 1.0))
        throw ContractError("mobile_ap_fraction must be in [0, 1]");
    if (!(colocated_fraction >= 0.0 && colocated_fraction <= 1.0))
        throw ContractError("colocated_fraction must be in [0, 1]");
    if (routine_change_day && (*routine_change_day < 1 || *routine_change_day >= n_days))
        throw ContractError("routine_change_day must fall inside the simulated period");
    if (routine_change_day && n_users < 2)
        throw ContractError("a routine change needs at least two users");
    if (n_relocated_aps < 0) throw ContractError("n_relocated_aps must be >= 0");
    if (n_relocated_aps > 0 && n_days < 2) throw ContractError("relocation needs two days");
    if (origin_ms < 0) throw ContractError("origin_ms must be >= 0");
    GeoPoint(center_lat, center_lon);
}

PlanePoint BusLoop::position_at(std::int64_t t_ms) const {
    const double total = cum_m.back();
    double s = std::fmod(phase_m + speed_mps * static_cast<double>(t_ms) / 1000.0, total);
    if (s < 0.0) s += total;
    const auto it = std::upper_bound(cum_m.begin(), cum_m.end(), s);
    const auto i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - cum_m.begin() - 1));
    const std::size_t a = std::min(i, stops.size() - 1);
    const std::size_t b = (a + 1) % stops.size();
    const double len = cum_m[a + 1] - cum_m[a];
    return lerp(stops[a], stops[b], len > 0.0 ? (s - cum_m[a]) / len : 0.0);
}

const Segment& GroundTruth::user_segment(std::size_t u, std::int64_t t) const {
    const auto& segs = users.at(u).segments;
    if (segs.empty()) throw ContractError("user has no trajectory");
    auto it = std::upper_bound(segs.begin(), segs.end(), t,
                               [](std::int64_t v, const Segment& s) { return v < s.start_ms; });
    return it == segs.begin() ? segs.front() : *(it - 1);
}

PlanePoint GroundTruth::user_plane(std::size_t u, std::int64_t t) const {
    return segment_position(user_segment(u, t), t);
}

GeoPoint GroundTruth::user_position(std::size_t u, Timestamp t) const {
    return frame.to_geo(user_plane(u, t.ms()));
}

PlanePoint GroundTruth::ap_plane(std::size_t i, std::int64_t t) const {
    const auto& ap = aps.at(i);
    switch (ap.kind) {
        case TruthApKind::building: return ap.pos;
        case TruthApKind::relocated: return t < ap.move_ms ? ap.pos : ap.pos_after;
        case TruthApKind::hotspot: return user_plane(static_cast<std::size_t>(ap.owner), t);
        case TruthApKind::bus: return loops.at(static_cast<std::size_t>(ap.loop)).position_at(t);
    }
    return ap.pos;
}

GeoPoint GroundTruth::ap_position(std::size_t i, Timestamp t) const {
    return frame.to_geo(ap_plane(i, t.ms()));
}

const char* GroundTruth::ap_class(std::size_t i) const {
    switch (aps.at(i).kind) {
        case TruthApKind::building: return "static";
        case TruthApKind::relocated: return "relocated";
        default: return "mobile";
    }
}

bool GroundTruth::is_mobile(std::size_t i) const {
    const auto k = aps.at(i).kind;
    return k == TruthApKind::hotspot || k == TruthApKind::bus;
}

bool GroundTruth::ap_active(std::size_t i, std::int64_t t) const {
    const auto& ap = aps.at(i);
    if (ap.kind != TruthApKind::hotspot) return true;
    return user_segment(static_cast<std::size_t>(ap.owner), t).away;
}

double GroundTruth::density_at(PlanePoint p) const {
    const int n = spec.density_cells;
    if (density.empty()) return 0.0;
    const double hw = spec.city_km_x * 500.0, hh = spec.city_km_y * 500.0;
    const auto i = static_cast<int>(std::floor((p.x + hw) / cell_w_m));
    const auto j = static_cast<int>(std::floor((p.y + hh) / cell_h_m));
    if (i < 0 || j < 0 || i >= n || j >= n) return 0.0;
    return density[static_cast<std::size_t>(j * n + i)];
}

GroundTruth generate_world(const WorldSpec& spec, Exec exec) {
    spec.validate();
    GroundTruth gt;
    gt.spec = spec;
    gt.frame = LocalFrame(GeoPoint(spec.center_lat, spec.center_lon));
    const Rng world(spec.seed, 0);
    const int n = spec.density_cells;
    gt.cell_w_m = spec.city_km_x * 1000.0 / n;
    gt.cell_h_m = spec.city_km_y * 1000.0 / n;
    gt.density = make_density(spec, world.split(1));
    const double hw = spec.city_km_x * 500.0, hh = spec.city_km_y * 500.0;

    // Buildings: Poisson count per cell in proportion to density.
    {
        Rng rng = world.split(2);
        PlaneGrid grid(kBuildingSeparationM);
        const double per_cell = static_cast<double>(spec.n_buildings) / static_cast<double>(n * n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const double w = gt.density[static_cast<std::size_t>(j * n + i)];
                const auto count = rng.poisson(per_cell * w);
                for (std::uint64_t k = 0; k < count; ++k) {
                    for (int attempt = 0; attempt < 30; ++attempt) {
                        const PlanePoint p{-hw + (i + rng.uniform()) * gt.cell_w_m,
                                           -hh + (j + rng.uniform()) * gt.cell_h_m};
                        bool clear = true;
                        grid.visit(p, kBuildingSeparationM, [&](std::size_t b) {
                            if (dist(p, gt.buildings[b].pos) < kBuildingSeparationM) clear = false;
                        });
                        if (!clear) continue;
                        grid.insert(p, gt.buildings.size());
                        gt.buildings.push_back({p, w, {}});
                        break;
                    }
                }
            }
        if (gt.buildings.empty()) throw ContractError("infeasible world: no buildings placed");
    }

    std::unordered_set<std::uint64_t> used_macs;
    // Static APs: every building has one, the rest follow density times noise.
    {
        Rng rng = world.split(3);
        std::vector<double> raw(gt.buildings.size());
        double total = 0.0;
        // The densest building hosts the shared campus. It stands for a cluster
        // of buildings, so its count follows density without the per-building
        // noise; a single noisy draw there would dominate the whole world.
        const std::size_t densest = densest_building(gt);
        for (std::size_t b = 0; b < raw.size(); ++b) {
            const double noise = rng.lognormal_unit_mean(spec.ap_count_sigma);
            raw[b] = gt.buildings[b].density * (b == densest ? 1.0 : noise);
            total += raw[b];
        }
        const double extra = std::max(0.0, static_cast<double>(spec.n_static_aps) -
                                               static_cast<double>(gt.buildings.size()));
        const double mu = total > 0.0 ? extra / total : 0.0;
        for (std::size_t b = 0; b < raw.size(); ++b) {
            const auto count = 1 + rng.poisson(mu * raw[b]);
            for (std::uint64_t k = 0; k < count; ++k) {
                TruthAp ap;
                ap.bssid = fresh_bssid(rng, used_macs);
                ap.kind = TruthApKind::building;
                if (!rng.bernoulli(0.05)) ap.ssid = Symbol("net-" + hex4(rng.next()));
                ap.pos = disc_offset(rng, gt.buildings[b].pos, kBuildingRadiusM);
                gt.buildings[b].aps.push_back(gt.aps.size());
                gt.aps.push_back(ap);
            }
        }
    }

    for (const auto& b : gt.buildings) gt.places.push_back({b.pos, -1});
    for (std::size_t b = 0; b < gt.buildings.size(); ++b) gt.places[b].building = static_cast<int>(b);

    PlaneGrid bgrid(kOutdoorClearanceM);
    for (std::size_t b = 0; b < gt.buildings.size(); ++b) bgrid.insert(gt.buildings[b].pos, b);

    // Users and their anchors.
    {
        Rng rng = world.split(4);
        Claims claims(gt);
        const auto n_users = static_cast<std::size_t>(spec.n_users);
        gt.users.resize(n_users);
        const int width = std::max<int>(3, static_cast<int>(std::to_string(n_users - 1).size()));
        for (std::size_t u = 0; u < n_users; ++u) {
            std::string id = std::to_string(u);
            gt.users[u].id = UserId("u" + std::string(static_cast<std::size_t>(width) - id.size(), '0') + id);
        }

        std::vector<std::size_t> order(n_users);
        for (std::size_t u = 0; u < n_users; ++u) order[u] = u;
        shuffle(order, rng);
        const auto n_coloc = static_cast<std::size_t>(
            std::llround(spec.colocated_fraction * static_cast<double>(n_users)));
        for (std::size_t k = 0; k < n_coloc; ++k) gt.users[order[k]].colocated = true;

        std::vector<int> pool;
        if (n_coloc > 0) {
            gt.campus = static_cast<int>(densest_building(gt));
            claims.claim(gt.campus);
            if (n_coloc >= 2)
                for (std::size_t k = 0; k < std::max<std::size_t>(2, n_coloc / 4); ++k)
                    pool.push_back(claims.pick(rng));
        }

        for (std::size_t u = 0; u < n_users; ++u) {
            auto& user = gt.users[u];
            auto& a = user.anchors;
            a.home = claims.pick(rng);
            const PlanePoint home = gt.places[static_cast<std::size_t>(a.home)].pos;
            a.work = user.colocated ? gt.campus : claims.pick(rng, home, 3000.0);
            const auto n_other = 2 + rng.below(5);
            for (std::uint64_t k = 0; k < n_other; ++k) {
                int place = -1;
                if (user.colocated && !pool.empty() && rng.bernoulli(0.35)) {
                    const int cand = pool[rng.below(pool.size())];
                    if (std::find(a.others.begin(), a.others.end(), cand) == a.others.end())
                        place = cand;
                }
                if (place < 0) place = claims.pick(rng, home, 2000.0);
                a.others.push_back(place);
            }
            double zsum = 0.0;
            for (std::size_t k = 0; k < a.others.size(); ++k) zsum += 1.0 / static_cast<double>(k + 1);
            for (std::size_t k = 0; k < a.others.size(); ++k)
                a.weights.push_back(1.0 / static_cast<double>(k + 1) / zsum);
            a.outdoor = make_outdoor_place(gt, bgrid, home, rng);
        }

        if (spec.routine_change_day) {
            // Sattolo's shuffle: a single cycle, so nobody is their own partner.
            std::vector<std::size_t> perm(n_users);
            for (std::size_t u = 0; u < n_users; ++u) perm[u] = u;
            for (std::size_t i = n_users - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i)]);
            for (std::size_t u = 0; u < n_users; ++u) gt.users[u].partner = static_cast<int>(perm[u]);
        }
    }

    // Mobile APs: personal hotspots and buses on loops past users' homes.
    {
        Rng rng = world.split(5);
        const auto n_mobile = static_cast<std::size_t>(
            std::llround(spec.mobile_ap_fraction * static_cast<double>(spec.n_static_aps)));
        // At most a third of the users carry a hotspot.
        const std::size_t n_hot =
            n_mobile == 0 ? 0 : std::min<std::size_t>((gt.users.size() + 2) / 3, (n_mobile + 5) / 6);
        std::vector<std::size_t> owners(gt.users.size());
        for (std::size_t u = 0; u < owners.size(); ++u) owners[u] = u;
        shuffle(owners, rng);
        for (std::size_t k = 0; k < n_hot; ++k) {
            TruthAp ap;
            ap.bssid = fresh_bssid(rng, used_macs);
            ap.kind = TruthApKind::hotspot;
            ap.ssid = Symbol(k % 2 == 0 ? "AndroidAP" : "iPhone");
            ap.owner = static_cast<int>(owners[k]);
            gt.users[owners[k]].hotspot = static_cast<int>(gt.aps.size());
            gt.aps.push_back(ap);
        }
        for (std::size_t k = n_hot; k < n_mobile; ++k) {
            BusLoop loop;
            loop.speed_mps = kBusSpeed;
            std::vector<std::size_t> riders(gt.users.size());
            for (std::size_t u = 0; u < riders.size(); ++u) riders[u] = u;
            shuffle(riders, rng);
            for (std::size_t r = 0; r < std::min<std::size_t>(5, riders.size()); ++r)
                loop.stops.push_back(
                    gt.places[static_cast<std::size_t>(gt.users[riders[r]].anchors.home)].pos);
            if (gt.campus >= 0 && rng.bernoulli(0.5))
                loop.stops.push_back(gt.places[static_cast<std::size_t>(gt.campus)].pos);
            while (loop.stops.size() < 3)
                loop.stops.push_back(
                    gt.buildings[rng.below(gt.buildings.size())].pos);
            PlanePoint c{0.0, 0.0};
            for (const auto& p : loop.stops) {
                c.x += p.x / static_cast<double>(loop.stops.size());
                c.y += p.y / static_cast<double>(loop.stops.size());
            }
            std::sort(loop.stops.begin(), loop.stops.end(), [&](PlanePoint a, PlanePoint b) {
                return std::atan2(a.y - c.y, a.x - c.x) < std::atan2(b.y - c.y, b.x - c.x);
            });
            loop.cum_m.push_back(0.0);
            for (std::size_t i = 0; i < loop.stops.size(); ++i)
                loop.cum_m.push_back(loop.cum_m.back() +
                                     dist(loop.stops[i], loop.stops[(i + 1) % loop.stops.size()]));
            if (!(loop.cum_m.back() > 0.0)) loop.cum_m.back() = 1.0;
            loop.phase_m = rng.uniform() * loop.cum_m.back();

            TruthAp ap;
            ap.bssid = fresh_bssid(rng, used_macs);
            ap.kind = TruthApKind::bus;
            ap.ssid = Symbol(k % 2 == 0 ? "Bedrebustur" : "Commutenet");
            ap.loop = static_cast<int>(gt.loops.size());
            gt.loops.push_back(std::move(loop));
            gt.aps.push_back(ap);
        }
    }

    // Relocated APs: building APs that move to another building mid-period.
    if (spec.n_relocated_aps > 0) {
        Rng rng = world.split(6);
        std::vector<std::size_t> candidates;
        for (std::size_t i = 0; i < gt.aps.size(); ++i)
            if (gt.aps[i].kind == TruthApKind::building) candidates.push_back(i);
        shuffle(candidates, rng);
        const auto count = std::min<std::size_t>(candidates.size(),
                                                 static_cast<std::size_t>(spec.n_relocated_aps));
        for (std::size_t k = 0; k < count; ++k) {
            auto& ap = gt.aps[candidates[k]];
            ap.kind = TruthApKind::relocated;
            const auto& dest = gt.buildings[rng.below(gt.buildings.size())];
            ap.pos_after = disc_offset(rng, dest.pos, kBuildingRadiusM);
            ap.move_ms = gt.start_ms() + (spec.n_days / 2) * kDayMs +
                         static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(kDayMs)));
        }
    }

    // Schedules only read shared state and write their own user.
    const auto n_users = static_cast<std::int64_t>(gt.users.size());
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t u = 0; u < n_users; ++u) plan_user(gt, static_cast<std::size_t>(u));
    } else {
        for (std::int64_t u = 0; u < n_users; ++u) plan_user(gt, static_cast<std::size_t>(u));
    }
    return gt;
}

namespace {

struct RegressionSums {
    long double n = 0, x = 0, y = 0, xx = 0, yy = 0, xy = 0;
    void add(double vx, double vy) {
        n += 1;
        x += vx;
        y += vy;
        xx += static_cast<long double>(vx) * vx;
        yy += static_cast<long double>(vy) * vy;
        xy += static_cast<long double>(vx) * vy;
    }
    void merge(const RegressionSums& o) {
        n += o.n;
        x += o.x;
        y += o.y;
        xx += o.xx;
        yy += o.yy;
        xy += o.xy;
    }
    std::optional<double> r2() const {
        const long double sxx = n * xx - x * x, syy = n * yy - y * y, sxy = n * xy - x * y;
        if (!(sxx > 0) || !(syy > 0)) return std::nullopt;
        return static_cast<double>(sxy * sxy / (sxx * syy));
    }
};

struct UserSensors {
    std::vector<WifiScan> scans;
    std::vector<GpsFix> fixes;
    SensorStats stats;
    RegressionSums sums;
};

double segment_distance(PlanePoint p, PlanePoint a, PlanePoint b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    const double f = len2 > 0.0 ? std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0) : 0.0;
    return dist(p, {a.x + f * dx, a.y + f * dy});
}

class Sensors {
public:
    explicit Sensors(const GroundTruth& gt) : gt_(gt), grid_(100.0) {
        geo_.resize(gt.aps.size());
        geo_after_.resize(gt.aps.size());
        for (std::size_t i = 0; i < gt.aps.size(); ++i) {
            const auto& ap = gt.aps[i];
            if (ap.kind == TruthApKind::building || ap.kind == TruthApKind::relocated) {
                grid_.insert(ap.pos, i);
                geo_[i] = gt.frame.to_geo(ap.pos);
            }
            if (ap.kind == TruthApKind::relocated) {
                grid_.insert(ap.pos_after, i);
                geo_after_[i] = gt.frame.to_geo(ap.pos_after);
            }
            if (ap.kind == TruthApKind::hotspot) hotspots_.push_back(i);
            if (ap.kind == TruthApKind::bus) {
                buses_.push_back(i);
                const auto& loop = gt.loops[static_cast<std::size_t>(ap.loop)];
                Box box{1e18, 1e18, -1e18, -1e18};
                for (const auto& p : loop.stops) {
                    box.x0 = std::min(box.x0, p.x);
                    box.y0 = std::min(box.y0, p.y);
                    box.x1 = std::max(box.x1, p.x);
                    box.y1 = std::max(box.y1, p.y);
                }
                boxes_.push_back(box);
            }
        }
    }

    UserSensors run(std::size_t u) const {
        const auto& spec = gt_.spec;
        const double radius = spec.visibility_radius_m;
        const double margin = radius + 5.0;
        Rng rng = Rng(spec.seed, 1000 + u).split(2);
        UserSensors out;
        const auto& user = gt_.users[u];
        const auto& segs = user.segments;

        // A stay has a fixed position, so distances to fixed APs and the set
        // of bus loops passing nearby are computed once per stay.
        struct Fixed {
            std::size_t ap;
            double d;        // before any move
            double d_after;  // relocated only
        };
        std::vector<Fixed> fixed;
        std::vector<std::size_t> near_buses;
        std::size_t cached_seg = SIZE_MAX;
        std::vector<std::size_t> cand;
        std::vector<std::size_t> hot_seg(hotspots_.size(), 0);
        std::vector<std::tuple<int, BssidId, std::size_t>> seen;  // (rssi, bssid, ap)

        const auto collect_fixed = [&](PlanePoint plane, const GeoPoint& here) {
            fixed.clear();
            cand.clear();
            grid_.visit(plane, margin, [&](std::size_t ap) { cand.push_back(ap); });
            std::sort(cand.begin(), cand.end());
            cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
            for (std::size_t ap : cand) {
                const bool moved = gt_.aps[ap].kind == TruthApKind::relocated;
                fixed.push_back({ap, haversine_m(here, geo_[ap]),
                                 moved ? haversine_m(here, geo_after_[ap]) : 0.0});
            }
        };

        const double period_ms = spec.wifi_scan_period_s * 1000.0;
        std::int64_t t = gt_.start_ms() + static_cast<std::int64_t>(rng.uniform() * period_ms);
        std::size_t seg = 0;
        while (t < gt_.end_ms()) {
            while (seg + 1 < segs.size() && segs[seg + 1].start_ms <= t) ++seg;
            const PlanePoint plane = segment_position(segs[seg], t);
            const GeoPoint here = gt_.frame.to_geo(plane);
            const Timestamp ts(t);
            seen.clear();
            const auto add = [&](std::size_t ap, double d) {
                const double rssi = -35.0 - 25.0 * std::log10(std::max(d, 1.0)) + rng.normal(0.0, 3.0);
                seen.emplace_back(static_cast<int>(std::clamp(std::lround(rssi), -100L, -20L)),
                                  gt_.aps[ap].bssid, ap);
            };

            const bool stay = segs[seg].place >= 0;
            if (!stay || cached_seg != seg) {
                collect_fixed(plane, here);
                near_buses.clear();
                for (std::size_t k = 0; k < buses_.size(); ++k) {
                    const auto& b = boxes_[k];
                    if (plane.x < b.x0 - margin || plane.x > b.x1 + margin ||
                        plane.y < b.y0 - margin || plane.y > b.y1 + margin)
                        continue;
                    if (stay) {
                        const auto& stops = gt_.loops[static_cast<std::size_t>(gt_.aps[buses_[k]].loop)].stops;
                        double m = 1e18;
                        for (std::size_t i = 0; i < stops.size(); ++i)
                            m = std::min(m, segment_distance(plane, stops[i], stops[(i + 1) % stops.size()]));
                        if (m > margin) continue;
                    }
                    near_buses.push_back(buses_[k]);
                }
                cached_seg = stay ? seg : SIZE_MAX;
            }
            for (const auto& f : fixed) {
                const auto& ap = gt_.aps[f.ap];
                const double d = ap.kind == TruthApKind::relocated && t >= ap.move_ms ? f.d_after : f.d;
                if (d <= radius) add(f.ap, d);
            }
            for (std::size_t k = 0; k < hotspots_.size(); ++k) {
                const std::size_t ap = hotspots_[k];
                const auto owner = static_cast<std::size_t>(gt_.aps[ap].owner);
                const auto& os = gt_.users[owner].segments;
                auto& i = hot_seg[k];
                while (i + 1 < os.size() && os[i + 1].start_ms <= t) ++i;
                if (!os[i].away) continue;
                if (owner == u) {
                    add(ap, 0.0);
                    continue;
                }
                const PlanePoint op = segment_position(os[i], t);
                if (dist(op, plane) > margin) continue;
                const double d = haversine_m(here, gt_.frame.to_geo(op));
                if (d <= radius) add(ap, d);
            }
            for (std::size_t ap : near_buses) {
                const PlanePoint bp = gt_.ap_plane(ap, t);
                if (dist(bp, plane) > margin) continue;
                const double d = haversine_m(here, gt_.frame.to_geo(bp));
                if (d <= radius) add(ap, d);
            }
            std::sort(seen.begin(), seen.end(), [](const auto& a, const auto& b) {
                if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
                return std::get<1>(a) < std::get<1>(b);
            });
            WifiScan scan{user.id, ts, {}};
            scan.sightings.reserve(seen.size());
            for (const auto& [rssi, bssid, ap] : seen)
                scan.sightings.push_back({bssid, gt_.aps[ap].ssid, static_cast<std::int16_t>(rssi)});

            ++out.stats.scans;
            if (!scan.sightings.empty()) ++out.stats.nonempty_scans;
            out.stats.sightings += scan.sightings.size();
            out.sums.add(gt_.density_at(plane), static_cast<double>(scan.sightings.size()));
            out.scans.push_back(std::move(scan));
            t += std::max<std::int64_t>(1, std::llround(period_ms * rng.uniform(0.75, 1.25)));
        }

        const double gps_ms = spec.gps_period_s * 1000.0;
        Rng noise = Rng(spec.seed, 1000 + u).split(3);
        for (std::int64_t f = gt_.start_ms() + static_cast<std::int64_t>(noise.uniform() * gps_ms);
             f < gt_.end_ms();) {
            const PlanePoint p = gt_.user_plane(u, f);
            const PlanePoint q{p.x + noise.normal(0.0, spec.gps_noise_m),
                               p.y + noise.normal(0.0, spec.gps_noise_m)};
            const GeoPoint g = gt_.frame.to_geo(q);
            out.fixes.push_back({user.id, Timestamp(f), GeoPoint(round7(g.lat()), round7(wrap_longitude(round7(g.lon())))),
                                 spec.gps_noise_m});
            ++out.stats.fixes;
            f += static_cast<std::int64_t>(std::llround(gps_ms));
        }
        return out;
    }

private:
    struct Box {
        double x0, y0, x1, y1;
    };

    const GroundTruth& gt_;
    PlaneGrid grid_;
    std::vector<GeoPoint> geo_;        // fixed APs
    std::vector<GeoPoint> geo_after_;  // relocated APs after the move
    std::vector<std::size_t> hotspots_;
    std::vector<std::size_t> buses_;
    std::vector<Box> boxes_;
};

}  // namespace

SensorOutput simulate_sensors(const GroundTruth& gt, Exec exec) {
    const Sensors sensors(gt);
    std::vector<UserSensors> per_user(gt.users.size());
    const auto n = static_cast<std::int64_t>(gt.users.size());
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t u = 0; u < n; ++u) per_user[static_cast<std::size_t>(u)] = sensors.run(static_cast<std::size_t>(u));
    } else {
        for (std::int64_t u = 0; u < n; ++u) per_user[static_cast<std::size_t>(u)] = sensors.run(static_cast<std::size_t>(u));
    }

    SensorOutput out;
    std::size_t n_scans = 0, n_fixes = 0;
    for (const auto& p : per_user) {
        n_scans += p.scans.size();
        n_fixes += p.fixes.size();
    }
    std::vector<WifiScan> scans;
    std::vector<GpsFix> fixes;
    scans.reserve(n_scans);
    fixes.reserve(n_fixes);
    RegressionSums sums;
    for (auto& p : per_user) {
        std::move(p.scans.begin(), p.scans.end(), std::back_inserter(scans));
        std::move(p.fixes.begin(), p.fixes.end(), std::back_inserter(fixes));
        std::vector<WifiScan>().swap(p.scans);
        out.stats.scans += p.stats.scans;
        out.stats.nonempty_scans += p.stats.nonempty_scans;
        out.stats.sightings += p.stats.sightings;
        out.stats.fixes += p.stats.fixes;
        sums.merge(p.sums);
    }
    out.stats.density_r2 = sums.r2();
    out.traces = TraceSet(std::move(fixes), std::move(scans));
    return out;
}

std::vector<double> routine_change_new_mass(const GroundTruth& gt) {
    if (!gt.spec.routine_change_day) return {};
    const std::int64_t change = gt.start_ms() + *gt.spec.routine_change_day * kDayMs;
    std::vector<double> out;
    for (const auto& user : gt.users) {
        std::set<int> before;
        for (const auto& s : user.segments)
            if (s.place >= 0 && s.start_ms < change) before.insert(s.place);
        double fresh = 0.0, total = 0.0;
        for (const auto& s : user.segments) {
            const std::int64_t lo = std::max(s.start_ms, change);
            const std::int64_t hi = std::min(s.end_ms, gt.end_ms());
            if (hi <= lo) continue;
            const auto len = static_cast<double>(hi - lo);
            total += len;
            if (s.place >= 0 && !before.contains(s.place)) fresh += len;
        }
        out.push_back(total > 0.0 ? fresh / total : 0.0);
    }
    return out;
}

}  // namespace wifitrack
