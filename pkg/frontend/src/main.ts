import { ApiClient } from "./api.js";
import { createReviewApp } from "./app.js";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");

const app = createReviewApp(root, new ApiClient(""), { pageSize: 20 });
app.start(window);
