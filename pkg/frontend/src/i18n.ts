// Caption catalogue. Ukrainian is the primary language of the tool; the
// English set exists for the header toggle and keeps the same keys.

export type Lang = "uk" | "en";

const CAPTIONS = {
  uk: {
    appTitle: "Кабінет інженера знань",
    mainMenu: "Головне меню",
    openAnalysis: "Модуль синтактико-семантичного аналізу природно-мовних текстів",
    openConverter: "Модуль конвертування формату OWL",
    openDesigner: "Модуль візуального проектування",
    projectLabel: "Проєкт",
    projectNamePlaceholder: "Назва нового проєкту",
    createProject: "Створити проєкт",
    noProjects: "Проєктів ще немає",
    backToMenu: "До головного меню",
    langToggle: "EN",

    chooseKind: "Оберіть тип термінів",
    allTerms: "Всі терміни ({n})",
    kindSingle: "Однослівні",
    kindMulti: "Словосполучення",
    kindAbbr: "Абревіатури",
    searchTerms: "Пошук по архіву термінів",
    chooseTerm: "Оберіть термін",
    found: "Знайдено: {n}",
    selectTerm: "Вибрати",
    showSentences: "Відобразити речення",
    basket: "Вибране",
    removeTerm: "Відалити",
    saveBasket: "Зберегти Вибране",
    sentencesFor: "Речення: {label}",
    busyBanner: "Виконується етап {stage}, зачекайте",
    noTermPicked: "Спочатку оберіть термін у списку",

    direction: "Напрям",
    kvpToOwl: "KVP → OWL",
    owlToKvp: "OWL → KVP",
    sourceText: "Вхідний документ",
    convertRun: "Конвертувати",
    convertResult: "Результат",
    download: "Завантажити",
    warningsTitle: "Попередження",
    errorPrefix: "Помилка: {message}",
    chooseFile: "Файл",

    conceptName: "Назва поняття",
    addConcept: "Додати поняття",
    renameConcept: "Перейменувати",
    removeConcept: "Видалити поняття",
    relationType: "Тип зв'язку",
    addRelation: "Додати зв'язок",
    removeRelation: "Видалити зв'язок",
    exportGraph: "Експорт",
    graphEmpty: "Онтологію ще не побудовано",
    zoomIn: "Збільшити",
    zoomOut: "Зменшити",
    versionLabel: "Версія {n}",
  },
  en: {
    appTitle: "Knowledge engineer workbench",
    mainMenu: "Main menu",
    openAnalysis: "Text analysis module",
    openConverter: "OWL format converter",
    openDesigner: "Visual design module",
    projectLabel: "Project",
    projectNamePlaceholder: "New project name",
    createProject: "Create project",
    noProjects: "No projects yet",
    backToMenu: "Back to menu",
    langToggle: "УКР",

    chooseKind: "Choose term kind",
    allTerms: "All terms ({n})",
    kindSingle: "Single-word",
    kindMulti: "Phrases",
    kindAbbr: "Abbreviations",
    searchTerms: "Search the term archive",
    chooseTerm: "Choose a term",
    found: "Found: {n}",
    selectTerm: "Select",
    showSentences: "Show sentences",
    basket: "Selected",
    removeTerm: "Remove",
    saveBasket: "Save selection",
    sentencesFor: "Sentences: {label}",
    busyBanner: "Stage {stage} is running, please wait",
    noTermPicked: "Pick a term in the list first",

    direction: "Direction",
    kvpToOwl: "KVP → OWL",
    owlToKvp: "OWL → KVP",
    sourceText: "Source document",
    convertRun: "Convert",
    convertResult: "Result",
    download: "Download",
    warningsTitle: "Warnings",
    errorPrefix: "Error: {message}",
    chooseFile: "File",

    conceptName: "Concept name",
    addConcept: "Add concept",
    renameConcept: "Rename",
    removeConcept: "Remove concept",
    relationType: "Relation type",
    addRelation: "Add relation",
    removeRelation: "Remove relation",
    exportGraph: "Export",
    graphEmpty: "No ontology built yet",
    zoomIn: "Zoom in",
    zoomOut: "Zoom out",
    versionLabel: "Version {n}",
  },
} as const;

export type CaptionKey = keyof (typeof CAPTIONS)["uk"];

let current: Lang = "uk";

export function getLang(): Lang {
  return current;
}

export function setLang(lang: Lang): void {
  current = lang;
}

export function toggleLang(): Lang {
  current = current === "uk" ? "en" : "uk";
  return current;
}

export function t(key: CaptionKey, params?: Record<string, string | number>): string {
  let text: string = CAPTIONS[current][key];
  if (params) {
    for (const [name, value] of Object.entries(params)) {
      text = text.replaceAll(`{${name}}`, String(value));
    }
  }
  return text;
}
