/** Browser entry point: pick a graphic, mount the selection app. */

import { createApi } from "./api.js";
import { SelectApp } from "./app.js";

async function boot(): Promise<void> {
    const root = document.getElementById("app");
    if (root === null) return;
    const api = createApi();
    const app = new SelectApp(root, api);

    const picker = document.getElementById("graphic-picker") as HTMLSelectElement | null;
    const uploadInput = document.getElementById("upload-input") as HTMLInputElement | null;

    const refresh = async (selected?: string) => {
        const ids = await api.listGraphics();
        if (picker !== null) {
            picker.innerHTML = "";
            for (const gid of ids) {
                const opt = document.createElement("option");
                opt.value = gid;
                opt.textContent = gid;
                picker.appendChild(opt);
            }
            if (selected !== undefined) picker.value = selected;
        }
        const target = selected ?? ids[0];
        if (target !== undefined) await app.loadGraphic(target);
    };

    picker?.addEventListener("change", () => void app.loadGraphic(picker.value));
    uploadInput?.addEventListener("change", async () => {
        const file = uploadInput.files?.[0];
        if (file === undefined) return;
        const gid = await api.upload(file);
        await refresh(gid);
    });

    await refresh();
}

if (typeof document !== "undefined") {
    if (document.readyState === "loading") {
        document.addEventListener("DOMContentLoaded", () => void boot());
    } else {
        void boot();
    }
}
