/** Thin typed client for the session HTTP API. */

import type { AfmDocument, ApiErrorBody, Snapshot, StepResponse } from "./model.js";

export class ApiError extends Error {
	constructor(
		public status: number,
		public stage: string,
		public code: string,
		message: string,
	) {
		super(message);
	}
}

async function raiseFor(response: Response): Promise<never> {
	let body: Partial<ApiErrorBody> = {};
	try {
		body = (await response.json()) as ApiErrorBody;
	} catch {
		// non-JSON error body: keep the defaults
	}
	throw new ApiError(
		response.status,
		body.stage ?? "unknown",
		body.code ?? "Error",
		body.message ?? response.statusText,
	);
}

export interface SessionOptions {
	phi?: boolean;
	orGroups?: boolean;
	orBudgetMs?: number;
}

export class SessionApi {
	constructor(
		private readonly base: string = "",
		private readonly fetchFn: typeof fetch = fetch,
	) {}

	private url(path: string): string {
		return `${this.base}${path}`;
	}

	async createSession(
		matrixCsv: string,
		dkJson?: string,
		options: SessionOptions = {},
	): Promise<StepResponse> {
		const form = new FormData();
		form.append("matrix", new Blob([matrixCsv], { type: "text/csv" }), "matrix.csv");
		if (dkJson !== undefined) {
			form.append("dk", new Blob([dkJson], { type: "application/json" }), "dk.json");
		}
		if (options.phi === false) form.append("phi", "off");
		if (options.orGroups) form.append("or_groups", "on");
		if (options.orBudgetMs !== undefined) {
			form.append("or_budget_ms", String(options.orBudgetMs));
		}
		const r = await this.fetchFn(this.url("/sessions"), { method: "POST", body: form });
		if (!r.ok) await raiseFor(r);
		return (await r.json()) as StepResponse;
	}

	async getState(id: string): Promise<Snapshot> {
		const r = await this.fetchFn(this.url(`/sessions/${id}`));
		if (!r.ok) await raiseFor(r);
		return (await r.json()) as Snapshot;
	}

	async answer(id: string, answer: unknown): Promise<StepResponse> {
		const r = await this.fetchFn(this.url(`/sessions/${id}/answer`), {
			method: "POST",
			headers: { "content-type": "application/json" },
			body: JSON.stringify({ answer }),
		});
		if (!r.ok) await raiseFor(r);
		return (await r.json()) as StepResponse;
	}

	async getModel(id: string): Promise<AfmDocument> {
		const r = await this.fetchFn(this.url(`/sessions/${id}/afm`));
		if (!r.ok) await raiseFor(r);
		return (await r.json()) as AfmDocument;
	}

	/** Raw export bytes; `afm-json` matches the batch CLI output exactly. */
	async exportRaw(id: string, format: "afm-json" | "text"): Promise<string> {
		const r = await this.fetchFn(this.url(`/sessions/${id}/export?format=${format}`));
		if (!r.ok) await raiseFor(r);
		return await r.text();
	}
}
