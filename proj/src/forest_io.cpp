#include "ballidx/forest_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ballidx/csv.hpp"

namespace ballidx {

namespace {

void write_point(std::ostream& out, std::span<const double> p) {
    for (double v : p) out << ' ' << format_double(v);
}

} // namespace

void save_forest(const Forest& forest, std::ostream& out) {
    if (forest.metric().kind() == MetricKind::Custom)
        throw config_error("forests built with a custom metric cannot be saved");
    const Dataset& ds = forest.dataset();

    out << kForestMagic << ' ' << kForestFormatVersion << '\n';
    out << "metric " << forest.metric().name() << '\n';
    out << "method " << to_string(forest.method()) << '\n';
    out << "dataset " << ds.dimension() << ' ' << ds.size() << '\n';
    for (ObjectId id = 0; id < ds.size(); ++id) {
        auto c = ds.coords(id);
        out << format_double(c[0]);
        write_point(out, c.subspan(1));
        out << '\n';
    }

    out << "summary";
    for (const auto& [name, field] : plan_summary_fields()) out << ' ' << name << '=' << forest.plan_summary().*field;
    out << " round_cap_hit=" << (forest.plan_summary().round_cap_hit ? 1 : 0) << '\n';

    out << "trees " << forest.trees().size() << '\n';
    for (std::size_t t = 0; t < forest.trees().size(); ++t) {
        const GhTree& tree = forest.trees()[t];
        out << "tree " << to_string(tree.kind()) << ' ' << tree.size() << ' ' << tree.capacity() << ' '
            << format_double(tree.radius()) << ' ' << tree.stats().oversized_leaves << ' ' << tree.nodes().size()
            << '\n';
        out << "center";
        write_point(out, tree.center());
        out << '\n';
        out << "neighbors " << forest.neighbors(t).size();
        for (std::size_t nb : forest.neighbors(t)) out << ' ' << nb;
        out << '\n';
        for (const Node& node : tree.nodes()) {
            if (const auto* in = std::get_if<InternalNode>(&node)) {
                out << "I " << in->left << ' ' << in->right << ' ' << format_double(in->radius_left) << ' '
                    << format_double(in->radius_right);
                write_point(out, in->pivot_left);
                write_point(out, in->pivot_right);
            } else {
                const auto& bucket = std::get<LeafNode>(node).bucket;
                out << "L " << bucket.size();
                for (ObjectId id : bucket) out << ' ' << id;
            }
            out << '\n';
        }
    }
    out << "end\n";
}

void save_forest(const Forest& forest, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot open '" + path + "' for writing");
    save_forest(forest, out);
    if (!out) throw data_error("failed writing '" + path + "'");
}

namespace {

// Whitespace-tokenised line reader that reports positions in its errors.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    void next(std::string_view expected_tag) {
        if (!std::getline(in_, line_)) fail("unexpected end of file, expected '" + std::string(expected_tag) + "'");
        ++line_no_;
        std::istringstream ss(line_);
        tokens_.clear();
        for (std::string tok; ss >> tok;) tokens_.push_back(tok);
        pos_ = 0;
        if (!expected_tag.empty() && word() != expected_tag)
            fail("expected '" + std::string(expected_tag) + "'");
    }

    std::string word() {
        if (pos_ >= tokens_.size()) fail("line ends early");
        return tokens_[pos_++];
    }

    template <class T>
    T number() {
        const std::string tok = word();
        T v{};
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || ptr != tok.data() + tok.size()) fail("malformed number '" + tok + "'");
        return v;
    }

    Point point(std::size_t dim) {
        Point p(dim);
        for (auto& v : p) v = number<double>();
        return p;
    }

    void finish_line() {
        if (pos_ != tokens_.size()) fail("unexpected trailing tokens");
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw data_error("forest artifact line " + std::to_string(line_no_) + ": " + what);
    }

private:
    std::istream& in_;
    std::string line_;
    std::vector<std::string> tokens_;
    std::size_t pos_ = 0;
    std::size_t line_no_ = 0;
};

GroupKind parse_kind(Reader& r) {
    const std::string k = r.word();
    if (k == "cluster") return GroupKind::Cluster;
    if (k == "bridge") return GroupKind::OverlapBridge;
    r.fail("unknown tree kind '" + k + "'");
}

} // namespace

Forest load_forest(std::istream& in) {
    Reader r(in);
    r.next(kForestMagic);
    if (const int version = r.number<int>(); version != kForestFormatVersion)
        r.fail("unsupported format version " + std::to_string(version));

    r.next("metric");
    DistanceFn fn;
    BuildMethod method{};
    try {
        fn = DistanceFn::from_name(r.word());
        r.next("method");
        method = parse_build_method(r.word());
    } catch (const Error& e) {
        if (e.kind() != Error::Kind::Config) throw;
        r.fail(e.what());
    }

    r.next("dataset");
    const auto dim = r.number<std::size_t>();
    const auto count = r.number<std::size_t>();
    if (dim == 0 || count == 0) r.fail("empty dataset");
    std::vector<double> flat;
    flat.reserve(dim * count);
    for (std::size_t i = 0; i < count; ++i) {
        r.next("");
        const Point p = r.point(dim);
        r.finish_line();
        flat.insert(flat.end(), p.begin(), p.end());
    }
    auto ds = std::make_shared<const Dataset>(dim, std::move(flat));

    r.next("summary");
    PlanSummary summary;
    for (const auto& [name, field] : plan_summary_fields()) {
        const std::string kv = r.word();
        const std::string prefix = std::string(name) + "=";
        if (kv.rfind(prefix, 0) != 0) r.fail("expected summary field '" + std::string(name) + "'");
        const std::string value = kv.substr(prefix.size());
        std::size_t v = 0;
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc{} || ptr != value.data() + value.size()) r.fail("malformed summary value '" + kv + "'");
        summary.*field = v;
    }
    const std::string cap = r.word();
    if (cap != "round_cap_hit=0" && cap != "round_cap_hit=1") r.fail("expected round_cap_hit");
    summary.round_cap_hit = cap.back() == '1';

    r.next("trees");
    const auto tree_count = r.number<std::size_t>();
    std::vector<GhTree> trees;
    std::vector<std::vector<std::size_t>> neighbors;
    for (std::size_t t = 0; t < tree_count; ++t) {
        r.next("tree");
        const GroupKind kind = parse_kind(r);
        const auto size = r.number<std::size_t>();
        const auto capacity = r.number<std::size_t>();
        const double radius = r.number<double>();
        const auto oversized = r.number<std::size_t>();
        const auto node_count = r.number<std::size_t>();
        r.next("center");
        Point center = r.point(dim);
        r.finish_line();
        r.next("neighbors");
        std::vector<std::size_t> nbs(r.number<std::size_t>());
        for (auto& nb : nbs) nb = r.number<std::size_t>();
        r.finish_line();

        std::vector<Node> nodes;
        nodes.reserve(node_count);
        for (std::size_t n = 0; n < node_count; ++n) {
            r.next("");
            const std::string tag = r.word();
            if (tag == "I") {
                InternalNode in;
                in.left = r.number<NodeIndex>();
                in.right = r.number<NodeIndex>();
                in.radius_left = r.number<double>();
                in.radius_right = r.number<double>();
                in.pivot_left = r.point(dim);
                in.pivot_right = r.point(dim);
                nodes.emplace_back(std::move(in));
            } else if (tag == "L") {
                LeafNode leaf;
                leaf.bucket.resize(r.number<std::size_t>());
                for (auto& id : leaf.bucket) {
                    id = r.number<ObjectId>();
                    if (id >= count) r.fail("object id out of range");
                }
                nodes.emplace_back(std::move(leaf));
            } else {
                r.fail("unknown node tag '" + tag + "'");
            }
            r.finish_line();
        }
        trees.push_back(GhTree::from_parts(std::move(nodes), size, capacity, std::move(center), radius, kind,
                                           oversized));
        neighbors.push_back(std::move(nbs));
    }
    r.next("end");
    return Forest(std::move(ds), std::move(fn), method, std::move(trees), std::move(neighbors), summary);
}

Forest load_forest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open '" + path + "' for reading");
    return load_forest(in);
}

} // namespace ballidx
