#include "snb/dendrogram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "snb/error.hpp"

namespace snb {

const char* to_string(Linkage linkage) {
    switch (linkage) {
        case Linkage::complete: return "complete";
        case Linkage::single: return "single";
        case Linkage::average: return "average";
    }
    return "complete";
}

Linkage parse_linkage(const std::string& text) {
    if (text == "complete") return Linkage::complete;
    if (text == "single") return Linkage::single;
    if (text == "average") return Linkage::average;
    throw UsageError("unknown linkage '" + text + "'");
}

Dendrogram cluster(const SquareMatrix& h, Linkage linkage) {
    const std::size_t p = h.size();
    if (p < 1) throw ValidationError("cluster: empty dissimilarity matrix");
    Dendrogram d;
    d.leaves = p;
    d.linkage = linkage;
    d.merges.reserve(p - 1);

    // Clusters are keyed by their smallest leaf; dist holds inter-cluster values.
    SquareMatrix dist = h;
    std::vector<bool> active(p, true);
    std::vector<std::size_t> node(p);
    std::vector<std::size_t> size(p, 1);
    std::iota(node.begin(), node.end(), std::size_t{0});

    double last = 0.0;
    for (std::size_t step = 0; step + 1 < p; ++step) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0;
        std::size_t bj = 0;
        bool found = false;
        for (std::size_t i = 0; i < p; ++i) {
            if (!active[i]) continue;
            for (std::size_t j = i + 1; j < p; ++j) {
                if (!active[j]) continue;
                if (!found || dist(i, j) < best) {
                    found = true;
                    best = dist(i, j);
                    bi = i;
                    bj = j;
                }
            }
        }
        double height = best;
        if (linkage == Linkage::average) height = std::max(height, last);
        if (height < last) throw Error("cluster: merge heights decreased");
        last = height;

        d.merges.push_back({node[bi], node[bj], height, size[bi] + size[bj]});
        for (std::size_t k = 0; k < p; ++k) {
            if (!active[k] || k == bi || k == bj) continue;
            double v = 0.0;
            switch (linkage) {
                case Linkage::complete: v = std::max(dist(bi, k), dist(bj, k)); break;
                case Linkage::single: v = std::min(dist(bi, k), dist(bj, k)); break;
                case Linkage::average:
                    v = (static_cast<double>(size[bi]) * dist(bi, k) + static_cast<double>(size[bj]) * dist(bj, k)) /
                        static_cast<double>(size[bi] + size[bj]);
                    break;
            }
            dist(bi, k) = v;
            dist(k, bi) = v;
        }
        active[bj] = false;
        size[bi] += size[bj];
        node[bi] = p + step;
    }
    return d;
}

CutGrid cut_grid(const Dendrogram& d, std::size_t max_cuts) {
    CutGrid grid;
    if (d.merges.empty() || max_cuts == 0) return grid;
    std::vector<double> heights;
    heights.reserve(d.merges.size());
    for (const auto& m : d.merges) heights.push_back(m.height);
    std::sort(heights.begin(), heights.end());
    heights.erase(std::unique(heights.begin(), heights.end()), heights.end());

    const double range = heights.back() - heights.front();
    const double eps = kCutNudge * (range > 0.0 ? range : 1.0);
    std::vector<double> cuts;
    cuts.reserve(heights.size());
    for (double h : heights) cuts.push_back(std::clamp(h - eps, 0.0, 1.0));
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    if (cuts.size() <= max_cuts) {
        grid.cuts = std::move(cuts);
        return grid;
    }
    const std::size_t m = cuts.size();
    if (max_cuts == 1) {
        grid.cuts.push_back(cuts[(m - 1) / 2]);
        return grid;
    }
    for (std::size_t i = 0; i < max_cuts; ++i) {
        const double pos = static_cast<double>(i) * static_cast<double>(m - 1) / static_cast<double>(max_cuts - 1);
        grid.cuts.push_back(cuts[static_cast<std::size_t>(std::floor(pos + 0.5))]);
    }
    return grid;
}

Partition partition_at(const Dendrogram& d, double cut) {
    const std::size_t p = d.leaves;
    std::vector<std::size_t> parent(p);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    // Any leaf of a node serves as its representative.
    std::vector<std::size_t> rep(p + d.merges.size());
    std::iota(rep.begin(), rep.begin() + static_cast<std::ptrdiff_t>(p), std::size_t{0});
    for (std::size_t i = 0; i < d.merges.size(); ++i) {
        const auto& m = d.merges[i];
        rep[p + i] = rep[m.left];
        if (m.height <= cut) {
            const auto a = find(rep[m.left]);
            const auto b = find(rep[m.right]);
            parent[std::max(a, b)] = std::min(a, b);
        }
    }
    Partition out;
    std::vector<std::ptrdiff_t> slot(p, -1);
    for (std::size_t leaf = 0; leaf < p; ++leaf) {
        const auto root = find(leaf);
        if (slot[root] < 0) {
            slot[root] = static_cast<std::ptrdiff_t>(out.clusters.size());
            out.clusters.emplace_back();
        }
        out.clusters[static_cast<std::size_t>(slot[root])].push_back(leaf);
    }
    return out;
}

void write_merges_csv(std::ostream& out, const Dendrogram& d) {
    out << "step,left,right,height,size\n";
    out.precision(17);
    for (std::size_t i = 0; i < d.merges.size(); ++i) {
        const auto& m = d.merges[i];
        out << i + 1 << ',' << m.left << ',' << m.right << ',' << m.height << ',' << m.size << '\n';
    }
}

}  // namespace snb
