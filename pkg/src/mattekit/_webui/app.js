/**
 * The review console: pages through samples of one status, shows RGB,
 * alpha, and inverse alpha side by side at 1:1 scale, and records
 * accept/reject decisions.
 *
 * State discipline: the server is the only source of truth. The console
 * holds the current page and a selection index; every decision round
 * trips through the decision endpoint and re-fetches, so a full page
 * reload always reconverges. At most one decision request is in flight;
 * keystrokes during flight are ignored.
 *
 * Keys: A = accept, R = reject, arrows = move selection,
 * PageUp/PageDown = page.
 */
import { clampPageIndex, pageCount, pageRequest } from "./pagination.js";
const STAT_LABELS = [
    ["semi_fraction", "semi"],
    ["attached_noise_fraction", "noise"],
    ["removed_fraction", "removed"],
];
export class ReviewApp {
    root;
    api;
    pageSize;
    statusFilter;
    zoom;
    samples = [];
    pageIndex = 0;
    totalForFilter = 0;
    selected = 0;
    inFlight = false;
    banner = null;
    doc;
    pendingOp = Promise.resolve();
    constructor(root, api, options = {}) {
        this.root = root;
        this.api = api;
        this.doc = root.ownerDocument;
        this.pageSize = options.pageSize ?? 20;
        this.statusFilter = options.statusFilter ?? "flagged";
        this.zoom = options.zoom ?? 4;
    }
    /** Resolves when the last scheduled refresh/decision has finished. */
    settled() {
        return this.pendingOp;
    }
    start(keyTarget) {
        keyTarget.addEventListener("keydown", (event) => {
            this.handleKey(event);
        });
        this.schedule(() => this.refresh());
    }
    schedule(op) {
        this.pendingOp = this.pendingOp.then(op, op);
        return this.pendingOp;
    }
    async refresh() {
        try {
            const stats = await this.api.stats();
            this.totalForFilter = this.statusFilter
                ? (stats.counts[this.statusFilter] ?? 0)
                : stats.total;
            this.pageIndex = clampPageIndex(this.pageIndex, this.totalForFilter, this.pageSize);
            const { offset, limit } = pageRequest(this.pageIndex, this.pageSize);
            this.samples = await this.api.listSamples(this.statusFilter, offset, limit);
            this.selected = Math.min(this.selected, Math.max(0, this.samples.length - 1));
            this.banner = null;
        }
        catch (error) {
            // keep the current page on screen; offer a retry
            this.banner = { kind: "offline", message: `server unreachable: ${String(error)}` };
        }
        this.render();
    }
    current() {
        return this.samples[this.selected] ?? null;
    }
    handleKey(event) {
        const key = event.key;
        if (key === "a" || key === "A") {
            void this.decide("accept");
        }
        else if (key === "r" || key === "R") {
            void this.decide("reject");
        }
        else if (key === "ArrowRight" || key === "ArrowDown") {
            this.moveSelection(1);
        }
        else if (key === "ArrowLeft" || key === "ArrowUp") {
            this.moveSelection(-1);
        }
        else if (key === "PageDown") {
            void this.gotoPage(this.pageIndex + 1);
        }
        else if (key === "PageUp") {
            void this.gotoPage(this.pageIndex - 1);
        }
    }
    moveSelection(delta) {
        if (this.samples.length === 0)
            return;
        this.selected = Math.min(Math.max(0, this.selected + delta), this.samples.length - 1);
        this.render();
    }
    gotoPage(index) {
        const clamped = clampPageIndex(index, this.totalForFilter, this.pageSize);
        if (clamped === this.pageIndex)
            return this.settled();
        this.pageIndex = clamped;
        this.selected = 0;
        return this.schedule(() => this.refresh());
    }
    setFilter(status) {
        this.statusFilter = status;
        this.pageIndex = 0;
        this.selected = 0;
        return this.schedule(() => this.refresh());
    }
    /**
     * Send a decision for the selected sample. Ignored while another
     * decision is in flight. The selection only advances after the server
     * acknowledges; a failed POST leaves everything as it was and shows
     * an inline error.
     */
    decide(decision) {
        const sample = this.current();
        if (!sample || this.inFlight)
            return this.settled();
        this.inFlight = true;
        this.render();
        return this.schedule(async () => {
            try {
                await this.api.decide(sample.id, decision);
                this.inFlight = false;
                await this.refresh();
            }
            catch (error) {
                this.inFlight = false;
                this.banner = { kind: "error", message: `decision failed: ${String(error)}` };
                this.render();
            }
        });
    }
    // rendering ------------------------------------------------------------
    el(tag, className, text) {
        const node = this.doc.createElement(tag);
        if (className)
            node.className = className;
        if (text !== undefined)
            node.textContent = text;
        return node;
    }
    render() {
        this.root.textContent = "";
        this.root.append(this.renderHeader());
        if (this.banner)
            this.root.append(this.renderBanner());
        if (this.samples.length === 0) {
            this.root.append(this.el("p", "empty-state", "no samples in this queue"));
        }
        else {
            this.root.append(this.renderQueue(), this.renderDetail());
        }
        this.root.append(this.renderPager());
    }
    renderHeader() {
        const header = this.el("header", "toolbar");
        const select = this.el("select", "status-filter");
        for (const status of ["flagged", "pending", "accepted", "rejected", "refined", ""]) {
            const option = this.el("option", undefined, status || "all");
            option.setAttribute("value", status);
            if (status === this.statusFilter)
                option.setAttribute("selected", "selected");
            select.append(option);
        }
        select.addEventListener("change", () => {
            void this.setFilter(select.value);
        });
        header.append(this.el("h1", "title", "matte review"), select, this.el("span", "hint", "A accept / R reject / arrows move"));
        return header;
    }
    renderBanner() {
        const banner = this.el("div", `banner banner-${this.banner.kind}`);
        banner.append(this.el("span", "banner-message", this.banner.message));
        if (this.banner.kind === "offline") {
            const retry = this.el("button", "retry", "retry");
            retry.addEventListener("click", () => {
                void this.schedule(() => this.refresh());
            });
            banner.append(retry);
        }
        return banner;
    }
    renderQueue() {
        const grid = this.el("ul", "queue");
        this.samples.forEach((sample, index) => {
            const card = this.el("li", index === this.selected ? "card selected" : "card");
            card.dataset.sampleId = sample.id;
            const thumb = this.el("img", "thumb");
            thumb.setAttribute("src", sample.images.inverse);
            thumb.setAttribute("alt", `inverse alpha of ${sample.id}`);
            card.append(thumb, this.el("div", "card-id", sample.id));
            card.append(this.renderBadges(sample));
            card.addEventListener("click", () => {
                this.selected = index;
                this.render();
            });
            grid.append(card);
        });
        return grid;
    }
    renderBadges(sample) {
        const badges = this.el("div", "badges");
        if (sample.screening) {
            for (const [field, label] of STAT_LABELS) {
                const value = sample.screening[field];
                badges.append(this.el("span", `badge badge-${label}`, `${label} ${value}`));
            }
        }
        badges.append(this.el("span", "badge badge-status", sample.status));
        return badges;
    }
    renderDetail() {
        const sample = this.current();
        const detail = this.el("section", "detail");
        detail.dataset.sampleId = sample.id;
        detail.append(this.el("h2", "detail-id", sample.id));
        const row = this.el("div", "panes");
        for (const kind of ["rgb", "alpha", "inverse"]) {
            const pane = this.el("figure", `pane pane-${kind}`);
            const img = this.el("img", "inspect");
            img.setAttribute("src", sample.images[kind]);
            img.setAttribute("alt", `${kind} of ${sample.id}`);
            this.attachLoupe(pane, img);
            pane.append(img, this.el("figcaption", "pane-label", kind));
            row.append(pane);
        }
        detail.append(row);
        if (this.inFlight) {
            detail.append(this.el("p", "in-flight", "submitting decision..."));
        }
        return detail;
    }
    /** A magnifier that re-displays the same PNG scaled up around the
     * cursor; no client-side pixel processing. */
    attachLoupe(pane, img) {
        const loupe = this.el("div", "loupe");
        loupe.style.display = "none";
        pane.append(loupe);
        pane.addEventListener("mousemove", (event) => {
            const rect = img.getBoundingClientRect();
            const x = event.clientX - rect.left;
            const y = event.clientY - rect.top;
            loupe.style.display = "block";
            loupe.style.backgroundImage = `url("${img.getAttribute("src")}")`;
            loupe.style.backgroundSize = `${rect.width * this.zoom}px ${rect.height * this.zoom}px`;
            loupe.style.backgroundPosition = `-${x * this.zoom - 40}px -${y * this.zoom - 40}px`;
            loupe.style.left = `${x + 12}px`;
            loupe.style.top = `${y + 12}px`;
        });
        pane.addEventListener("mouseleave", () => {
            loupe.style.display = "none";
        });
    }
    renderPager() {
        const pager = this.el("nav", "pager");
        const pages = pageCount(this.totalForFilter, this.pageSize);
        const prev = this.el("button", "page-prev", "prev");
        const next = this.el("button", "page-next", "next");
        if (this.pageIndex === 0)
            prev.setAttribute("disabled", "disabled");
        if (this.pageIndex >= pages - 1)
            next.setAttribute("disabled", "disabled");
        prev.addEventListener("click", () => void this.gotoPage(this.pageIndex - 1));
        next.addEventListener("click", () => void this.gotoPage(this.pageIndex + 1));
        pager.append(prev, this.el("span", "page-label", `page ${this.pageIndex + 1} of ${pages}`), next);
        return pager;
    }
}
export function createReviewApp(root, api, options = {}) {
    return new ReviewApp(root, api, options);
}
