/** DOM rendering: upload form, question wizard, final model inspector. */

import type { SessionController } from "./controller.js";
import {
	buildTree,
	candidateLabels,
	describeQuestion,
	phaseOf,
	questionEdges,
	treeFromModel,
	type TreeNode,
} from "./flow.js";

function el<K extends keyof HTMLElementTagNameMap>(
	tag: K,
	cls?: string,
	text?: string,
): HTMLElementTagNameMap[K] {
	const node = document.createElement(tag);
	if (cls) node.className = cls;
	if (text !== undefined) node.textContent = text;
	return node;
}

function renderTree(node: TreeNode): HTMLElement {
	const li = el("li");
	const label = el("span", "feature", node.name);
	if (node.mandatory) label.classList.add("mandatory");
	li.append(label);
	for (const attr of node.attributes) {
		li.append(el("span", "attribute", ` {${attr}}`));
	}
	for (const g of node.groups) {
		li.append(el("span", `group ${g.kind}`, ` <${g.kind}: ${g.children.join(" | ")}>`));
	}
	if (node.children.length) {
		const ul = el("ul");
		for (const c of node.children) ul.append(renderTree(c));
		li.append(ul);
	}
	return li;
}

export class App {
	constructor(
		private readonly root: HTMLElement,
		private readonly controller: SessionController,
	) {
		controller.onChange(() => this.render());
	}

	render(): void {
		const { snapshot, model, error, busy } = this.controller.state;
		this.root.replaceChildren();

		if (error) {
			this.root.append(
				el("div", "error", `${error.stage}/${error.code}: ${error.message}`),
			);
		}

		const phase = phaseOf(snapshot);
		if (phase === "upload") {
			this.root.append(this.uploadForm());
			return;
		}
		if (phase === "question" && snapshot?.question) {
			this.root.append(this.questionPanel(busy));
		}
		if (phase === "done" && model) {
			this.root.append(this.resultPanel());
		}
		this.root.append(this.contextPanel());
	}

	private uploadForm(): HTMLElement {
		const panel = el("div", "panel upload");
		panel.append(el("h2", undefined, "Start a synthesis session"));
		const matrix = el("input");
		matrix.type = "file";
		matrix.accept = ".csv";
		const dk = el("input");
		dk.type = "file";
		dk.accept = ".json";
		const phi = el("input");
		phi.type = "checkbox";
		phi.checked = true;
		const orGroups = el("input");
		orGroups.type = "checkbox";
		const go = el("button", undefined, "Upload matrix");
		go.addEventListener("click", async () => {
			const file = matrix.files?.[0];
			if (!file) return;
			const csv = await file.text();
			const dkText = dk.files?.[0] ? await dk.files[0].text() : undefined;
			await this.controller.start(csv, dkText, {
				phi: phi.checked,
				orGroups: orGroups.checked,
			});
		});
		const row = (label: string, input: HTMLElement) => {
			const div = el("div", "row");
			div.append(el("label", undefined, label), input);
			return div;
		};
		panel.append(
			row("Configuration matrix (CSV)", matrix),
			row("Domain knowledge (JSON, optional)", dk),
			row("Residual constraint (exact model)", phi),
			row("Search or-groups", orGroups),
			go,
		);
		return panel;
	}

	private questionPanel(busy: boolean): HTMLElement {
		const snapshot = this.controller.state.snapshot;
		const q = snapshot?.question;
		const panel = el("div", "panel question");
		if (!q || !snapshot) return panel;
		panel.append(el("h2", undefined, describeQuestion(q)));
		const labels = candidateLabels(q);
		if (q.kind === "group") {
			const boxes: HTMLInputElement[] = [];
			for (const [i, label] of labels.entries()) {
				const div = el("div", "candidate");
				const box = el("input");
				box.type = "checkbox";
				box.dataset.index = String(i);
				boxes.push(box);
				div.append(box, el("span", undefined, label));
				panel.append(div);
			}
			const submit = el("button", undefined, "Keep selected groups");
			submit.disabled = busy;
			submit.addEventListener("click", () => {
				const picked = boxes
					.map((b, i) => (b.checked ? i : -1))
					.filter((i) => i >= 0);
				void this.controller.submit(picked);
			});
			panel.append(submit);
		} else if (q.kind === "bounds") {
			const input = el("input");
			input.placeholder = "e.g. 10, 20";
			const submit = el("button", undefined, "Confirm bounds");
			submit.disabled = busy;
			submit.addEventListener("click", () => void this.controller.submit(input.value));
			panel.append(
				el("div", "hint", `domain: ${q.candidates.join(", ")}`),
				input,
				submit,
			);
		} else {
			for (const [i, label] of labels.entries()) {
				const btn = el("button", "candidate", label);
				btn.disabled = busy;
				btn.addEventListener("click", () => void this.controller.submit([i]));
				panel.append(btn);
			}
		}
		return panel;
	}

	private contextPanel(): HTMLElement {
		const snapshot = this.controller.state.snapshot;
		const panel = el("div", "panel context");
		if (!snapshot) return panel;
		const tree = buildTree(snapshot.progress.root, snapshot.progress.parents ?? {}, {
			placement: snapshot.progress.placement,
			groups: snapshot.progress.groups,
		});
		if (tree) {
			panel.append(el("h3", undefined, "Hierarchy so far"));
			const ul = el("ul", "tree");
			ul.append(renderTree(tree));
			panel.append(ul);
		}
		if (snapshot.question) {
			const edges = questionEdges(snapshot.question, snapshot.progress);
			if (edges.length) {
				panel.append(el("h3", undefined, "Relevant implications"));
				const ul = el("ul", "edges");
				for (const [a, b] of edges) ul.append(el("li", undefined, `${a} => ${b}`));
				panel.append(ul);
			}
		}
		return panel;
	}

	private resultPanel(): HTMLElement {
		const { model, snapshot } = this.controller.state;
		const panel = el("div", "panel result");
		if (!model) return panel;
		panel.append(el("h2", undefined, `Synthesized model (${model.mode})`));
		const tree = treeFromModel(model);
		if (tree) {
			const ul = el("ul", "tree");
			ul.append(renderTree(tree));
			panel.append(ul);
		}
		panel.append(el("h3", undefined, "Constraints"));
		const list = el("ul", "constraints");
		for (const text of model.constraints) list.append(el("li", undefined, text));
		panel.append(list);

		const over = snapshot?.over_approximation;
		if (over) {
			panel.append(el("h3", undefined, "Over-approximation"));
			if (!over.computed) {
				panel.append(el("div", "hint", over.reason ?? "not computed"));
			} else if (!over.extra_count) {
				panel.append(el("div", "hint", "the diagram admits no extra configurations"));
			} else {
				panel.append(
					el("div", "hint", `${over.extra_count} configurations beyond the matrix`),
				);
				const table = el("ul", "extra");
				for (const row of over.extra ?? []) {
					const values = Object.entries(row.values)
						.map(([k, v]) => `${k}=${String(v)}`)
						.join(", ");
					table.append(el("li", undefined, `{${row.selected.join(", ")}} ${values}`));
				}
				panel.append(table);
			}
		}

		const exportJson = el("button", undefined, "Download model JSON");
		exportJson.addEventListener("click", async () => {
			const text = await this.controller.exportModel("afm-json");
			if (text) download("model.afm.json", text);
		});
		const exportText = el("button", undefined, "Download tree rendering");
		exportText.addEventListener("click", async () => {
			const text = await this.controller.exportModel("text");
			if (text) download("model.txt", text);
		});
		panel.append(exportJson, exportText);
		return panel;
	}
}

function download(name: string, text: string): void {
	const a = document.createElement("a");
	a.href = URL.createObjectURL(new Blob([text]));
	a.download = name;
	a.click();
	URL.revokeObjectURL(a.href);
}
