// Python bindings for the DOAGC core: dataset generation/loading, the
// training loop, and the individual graph/clustering/metric operations.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "doagc/data.hpp"
#include "doagc/model.hpp"

namespace py = pybind11;
using namespace doagc;

namespace {

Tensor tensor_from(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 2) throw ShapeError("expected a 2-D array");
    Tensor t(static_cast<std::size_t>(arr.shape(0)), static_cast<std::size_t>(arr.shape(1)));
    std::copy(arr.data(), arr.data() + t.size(), t.data());
    return t;
}

py::array_t<double> array_from(const Tensor& t) {
    py::array_t<double> arr({t.rows(), t.cols()});
    std::copy(t.data(), t.data() + t.size(), arr.mutable_data());
    return arr;
}

py::dict graph_to_dict(const MultiViewGraph& g) {
    py::dict d;
    d["n"] = g.n;
    py::list views;
    for (const Adjacency& a : g.views) views.append(array_from(a.matrix));
    d["views"] = views;
    d["features"] = array_from(g.features);
    d["labels"] = g.labels ? py::cast(*g.labels) : py::object(py::none());
    return d;
}

TrainConfig config_from_kwargs(const py::kwargs& kw) {
    TrainConfig cfg;
    for (auto item : kw) {
        const std::string key = py::str(item.first);
        const py::handle v = item.second;
        if (key == "epochs") cfg.epochs = v.cast<int>();
        else if (key == "lr") cfg.lr = v.cast<double>();
        else if (key == "order") cfg.order = v.cast<int>();
        else if (key == "rho") cfg.rho = v.cast<double>();
        else if (key == "mask_rate") cfg.mask_rate = v.cast<double>();
        else if (key == "w_init") cfg.w_init = v.cast<double>();
        else if (key == "lambda_nrec") cfg.lambda_nrec = v.cast<double>();
        else if (key == "hidden_dim") cfg.hidden_dim = v.cast<int>();
        else if (key == "embed_dim") cfg.embed_dim = v.cast<int>();
        else if (key == "kmeans_interval") cfg.kmeans_interval = v.cast<int>();
        else if (key == "seed") cfg.seed = v.cast<std::uint64_t>();
        else if (key == "loss") cfg.loss = v.cast<std::string>() == "mse" ? LossKind::Mse : LossKind::Bce;
        else if (key == "use_rec_loss") cfg.use_rec_loss = v.cast<bool>();
        else if (key == "use_nrec_loss") cfg.use_nrec_loss = v.cast<bool>();
        else if (key == "use_s") cfg.use_s = v.cast<bool>();
        else if (key == "use_a") cfg.use_a = v.cast<bool>();
        else if (key == "topk") cfg.topk = v.cast<std::size_t>();
        else if (key == "normalize_h") cfg.normalize_h_for_kmeans = v.cast<bool>();
        else throw ContractError("unknown config option '" + key + "'");
    }
    return cfg;
}

MultiViewGraph graph_from_parts(const py::list& views, const py::array_t<double>& features,
                                const py::object& labels) {
    MultiViewGraph g;
    g.features = tensor_from(features);
    g.n = g.features.rows();
    for (auto v : views) {
        g.views.push_back(Adjacency{tensor_from(v.cast<py::array_t<double>>())});
    }
    if (!labels.is_none()) g.labels = labels.cast<std::vector<int>>();
    g.validate();
    return g;
}

py::dict result_to_dict(const TrainResult& res) {
    py::dict d;
    d["h"] = array_from(res.h);
    d["assignments"] = res.clusters.assignments;
    d["final_w"] = res.final_w;
    if (res.final_metrics) {
        py::dict m;
        m["acc"] = res.final_metrics->acc;
        m["nmi"] = res.final_metrics->nmi;
        m["ari"] = res.final_metrics->ari;
        m["f1"] = res.final_metrics->f1;
        d["metrics"] = m;
    } else {
        d["metrics"] = py::none();
    }
    py::list trace;
    for (const EpochRecord& e : res.trace) {
        py::dict row;
        row["epoch"] = e.epoch;
        row["loss_rec"] = e.loss_rec;
        row["loss_nrec"] = e.loss_nrec;
        row["w"] = e.w;
        trace.append(row);
    }
    d["trace"] = trace;
    py::list states;
    for (const ViewState& st : res.states) {
        py::dict s;
        s["s"] = array_from(st.s);
        s["a_hat"] = array_from(st.a_hat.matrix);
        s["w"] = st.w;
        s["alpha"] = st.alpha;
        states.append(s);
    }
    d["states"] = states;
    auto hom_rows = [](const std::vector<HomophilyRow>& rows) {
        py::list out;
        for (const HomophilyRow& r : rows) {
            py::dict d2;
            d2["a"] = r.a;
            d2["s"] = r.s;
            d2["a_hat"] = r.a_hat;
            out.append(d2);
        }
        return out;
    };
    py::dict hom;
    hom["true"] = res.homophily.has_true ? py::object(hom_rows(res.homophily.vs_true))
                                         : py::object(py::none());
    hom["pseudo"] = hom_rows(res.homophily.vs_pseudo);
    d["homophily"] = hom;
    return d;
}

} // namespace

PYBIND11_MODULE(_doagc, m) {
    m.doc() = "Dual-optimized adaptive graph reconstruction for multi-view graph clustering";

    py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);
    py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_ValueError);
    py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);

    m.def(
        "generate_synthetic",
        [](const std::string& out_dir, std::size_t n, std::size_t k, std::size_t views,
           const std::vector<double>& homophily, std::size_t edges, std::size_t feature_dim,
           std::uint64_t seed, double center_separation, double feature_noise) {
            SynthSpec spec;
            spec.n = n;
            spec.k = k;
            spec.views = views;
            spec.target_homophily = homophily;
            spec.edges = edges;
            spec.feature_dim = feature_dim;
            spec.seed = seed;
            spec.center_separation = center_separation;
            spec.feature_noise = feature_noise;
            return graph_to_dict(generate_synthetic(spec, out_dir).graph);
        },
        py::arg("out_dir"), py::arg("n"), py::arg("k"), py::arg("views"), py::arg("homophily"),
        py::arg("edges"), py::arg("feature_dim"), py::arg("seed") = 42,
        py::arg("center_separation") = 6.0, py::arg("feature_noise") = 1.0,
        "Write a homophily-controlled synthetic dataset and return it");

    m.def(
        "load_dataset",
        [](const std::string& dir) {
            Dataset ds = load_dataset(dir);
            py::dict d = graph_to_dict(ds.graph);
            d["name"] = ds.manifest.name;
            d["k"] = ds.manifest.k;
            return d;
        },
        py::arg("dir"));

    m.def(
        "train",
        [](const std::string& data_dir, int k, const py::kwargs& kw) {
            Dataset ds = load_dataset(data_dir);
            const int kk = k > 0 ? k : static_cast<int>(ds.manifest.k);
            return result_to_dict(train(ds.graph, kk, config_from_kwargs(kw)));
        },
        py::arg("data_dir"), py::arg("k") = 0,
        "Train on a dataset directory; config fields arrive as keyword arguments");

    m.def(
        "train_arrays",
        [](const py::list& views, const py::array_t<double>& features, const py::object& labels,
           int k, const py::kwargs& kw) {
            return result_to_dict(
                train(graph_from_parts(views, features, labels), k, config_from_kwargs(kw)));
        },
        py::arg("views"), py::arg("features"), py::arg("labels"), py::arg("k"),
        "Train on in-memory adjacency/feature arrays");

    m.def(
        "cosine_similarity_graph",
        [](const py::array_t<double>& z) { return array_from(cosine_similarity_graph(tensor_from(z))); },
        py::arg("z"));

    m.def(
        "edge_homophily",
        [](const py::array_t<double>& adjacency, const std::vector<int>& labels) {
            const Adjacency a{tensor_from(adjacency)};
            const int k = 1 + *std::max_element(labels.begin(), labels.end());
            return edge_homophily(a, to_onehot(labels, k));
        },
        py::arg("adjacency"), py::arg("labels"));

    m.def(
        "weighted_homophily",
        [](const py::array_t<double>& weights, const std::vector<int>& labels) {
            const int k = 1 + *std::max_element(labels.begin(), labels.end());
            return weighted_homophily(tensor_from(weights), to_onehot(labels, k));
        },
        py::arg("weights"), py::arg("labels"));

    m.def(
        "reconstruct",
        [](const py::array_t<double>& s, const py::array_t<double>& a, double w) {
            return array_from(reconstruct(tensor_from(s), Adjacency{tensor_from(a)}, w).matrix);
        },
        py::arg("s"), py::arg("a"), py::arg("w"));

    m.def(
        "aggregate",
        [](const py::array_t<double>& a_hat, const py::array_t<double>& x, int order) {
            return array_from(aggregate(Adjacency{tensor_from(a_hat)}, tensor_from(x), order));
        },
        py::arg("a_hat"), py::arg("x"), py::arg("order") = 1);

    m.def(
        "kmeans",
        [](const py::array_t<double>& x, int k, int n_init, int max_iter, double tol,
           std::uint64_t seed) {
            std::mt19937_64 rng(seed);
            ClusterResult r = kmeans(tensor_from(x), k, n_init, max_iter, tol, rng);
            py::dict d;
            d["assignments"] = r.assignments;
            d["centers"] = array_from(r.centers);
            d["inertia"] = r.inertia;
            return d;
        },
        py::arg("x"), py::arg("k"), py::arg("n_init") = 10, py::arg("max_iter") = 300,
        py::arg("tol") = 1e-4, py::arg("seed") = 42);

    m.def("accuracy", &accuracy, py::arg("pred"), py::arg("truth"));
    m.def("nmi", &nmi, py::arg("pred"), py::arg("truth"));
    m.def("ari", &ari, py::arg("pred"), py::arg("truth"));
    m.def("macro_f1", &macro_f1, py::arg("pred"), py::arg("truth"));
    m.def("weighted_f1", &weighted_f1, py::arg("pred"), py::arg("truth"));
}
